#ifndef PHOTONGEN_PMF_HPP
#define PHOTONGEN_PMF_HPP

#include <vector>

namespace photongen {

/// Truncated photon-number distribution: probabilities p_0..p_n_max plus the
/// explicit probability mass sitting at n > n_max. Storing the tail makes
/// total-variation comparisons against full-support distributions honest.
struct PhotonPMF {
    std::vector<double> probs; ///< p_n for n = 0..n_max
    double tail_mass = 0.0;    ///< probability of n > n_max

    int n_max() const { return static_cast<int>(probs.size()) - 1; }
};

/// Throws DomainError unless all entries are non-negative and
/// sum(probs) + tail_mass = 1 within 1e-12.
void validate(const PhotonPMF &pmf);

/// Validating constructor.
PhotonPMF make_photon_pmf(std::vector<double> probs, double tail_mass);

/// Geometric (Bose-Einstein) statistics of mean `mean`, truncated at n_max:
/// p_n = mean^n / (mean+1)^(n+1), tail = (mean/(mean+1))^(n_max+1).
PhotonPMF bose_einstein_pmf(double mean, int n_max);

/// Uniform distribution on the integer range [n_lo, n_hi], zero elsewhere,
/// no tail. Truncate with `truncated` before inversion if only a prefix is
/// to be constrained.
PhotonPMF uniform_truncated_pmf(int n_lo, int n_hi);

/// Keeps p_0..p_n_max and moves everything beyond into tail_mass.
PhotonPMF truncated(const PhotonPMF &pmf, int n_max);

/// First moment sum(n * p_n) of the stored (truncated) part.
double pmf_mean(const PhotonPMF &pmf);

} // namespace photongen

#endif
