#include "photongen/pmf.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "photongen/errors.hpp"

namespace photongen {

void validate(const PhotonPMF &pmf) {
    if (pmf.probs.empty())
        throw DomainError("PhotonPMF: empty probability vector");
    double sum = 0.0;
    for (std::size_t n = 0; n < pmf.probs.size(); ++n) {
        if (!(pmf.probs[n] >= 0.0))
            throw DomainError("PhotonPMF: p_" + std::to_string(n) + " is negative or NaN");
        sum += pmf.probs[n];
    }
    if (!(pmf.tail_mass >= 0.0))
        throw DomainError("PhotonPMF: tail_mass is negative or NaN");
    if (std::abs(sum + pmf.tail_mass - 1.0) > 1e-12)
        throw DomainError("PhotonPMF: probabilities + tail sum to " +
                          std::to_string(sum + pmf.tail_mass) + ", expected 1");
}

PhotonPMF make_photon_pmf(std::vector<double> probs, double tail_mass) {
    PhotonPMF pmf{std::move(probs), tail_mass};
    validate(pmf);
    return pmf;
}

PhotonPMF bose_einstein_pmf(double mean, int n_max) {
    if (!(mean > 0.0))
        throw DomainError("bose_einstein_pmf: mean must be positive");
    if (n_max < 0)
        throw DomainError("bose_einstein_pmf: n_max must be non-negative");
    PhotonPMF pmf;
    pmf.probs.resize(static_cast<std::size_t>(n_max) + 1);
    const double ratio = mean / (mean + 1.0);
    double p = 1.0 / (mean + 1.0); // p_0
    for (int n = 0; n <= n_max; ++n) {
        pmf.probs[static_cast<std::size_t>(n)] = p;
        p *= ratio;
    }
    pmf.tail_mass = std::pow(ratio, n_max + 1);
    return pmf;
}

PhotonPMF uniform_truncated_pmf(int n_lo, int n_hi) {
    if (n_lo < 0 || n_lo > n_hi)
        throw DomainError("uniform_truncated_pmf: need 0 <= n_lo <= n_hi");
    PhotonPMF pmf;
    pmf.probs.assign(static_cast<std::size_t>(n_hi) + 1, 0.0);
    const double p = 1.0 / (n_hi - n_lo + 1);
    for (int n = n_lo; n <= n_hi; ++n)
        pmf.probs[static_cast<std::size_t>(n)] = p;
    pmf.tail_mass = 0.0;
    return pmf;
}

PhotonPMF truncated(const PhotonPMF &pmf, int n_max) {
    if (n_max < 0)
        throw DomainError("truncated: n_max must be non-negative");
    if (n_max >= pmf.n_max())
        return pmf;
    PhotonPMF out;
    out.probs.assign(pmf.probs.begin(), pmf.probs.begin() + n_max + 1);
    double moved = 0.0;
    for (std::size_t n = static_cast<std::size_t>(n_max) + 1; n < pmf.probs.size(); ++n)
        moved += pmf.probs[n];
    out.tail_mass = pmf.tail_mass + moved;
    return out;
}

double pmf_mean(const PhotonPMF &pmf) {
    double m = 0.0;
    for (std::size_t n = 1; n < pmf.probs.size(); ++n)
        m += static_cast<double>(n) * pmf.probs[n];
    return m;
}

} // namespace photongen
