#ifndef PHOTONGEN_MANDEL_HPP
#define PHOTONGEN_MANDEL_HPP

#include <span>
#include <vector>

#include "photongen/intensity_model.hpp"
#include "photongen/level_table.hpp"
#include "photongen/pmf.hpp"

namespace photongen {

/// Poisson probability exp(-w) w^n / n!, evaluated in log space so that it
/// neither overflows nor underflows prematurely for n up to 10^6.
double poisson_weight(double w, long long n);

/// Poisson statistics of the given mean, truncated at n_max.
PhotonPMF poisson_pmf(double mean, int n_max);

/// Poisson mixture over an arbitrary discrete intensity set:
/// p_n = sum_i probs[i] * poisson_weight(levels[i], n). The probabilities
/// must sum to 1; tail_mass = 1 - sum(p_n).
PhotonPMF forward_mixture(std::span<const double> levels, std::span<const double> probs,
                          int n_max);

/// forward_mixture over a LevelTable.
PhotonPMF forward_discrete(const LevelTable &table, int n_max);

struct QuadratureOptions {
    double rel_tol = 1e-10; ///< per-element relative tolerance
    int max_depth = 15;     ///< adaptive Gauss-Kronrod subdivision depth
};

/// Photon statistics of a continuous intensity model via adaptive quadrature
/// of the Poisson mixture integral, element by element. Heavy-tailed families
/// are integrated under u = ln W; integration limits are chosen so that the
/// neglected Poisson-kernel mass per element stays below 1e-13.
/// Throws NumericalError carrying the worst element index if the quadrature
/// fails to reach the tolerance within the depth limit.
PhotonPMF forward_continuous(const IntensityModel &model, int n_max,
                             const QuadratureOptions &opts = {});

/// The discrete forward operator in matrix form: rows 0..n_max hold
/// A[n][i] = poisson_weight(levels[i], n), and one final all-ones
/// normalization row brings the shape to (n_max+2) x 128.
struct DesignMatrix {
    int n_max = 0;
    std::array<double, kNumLevels> levels{};
    std::vector<double> entries; ///< row-major, (n_max+2) rows by 128 columns

    int rows() const { return n_max + 2; }
    double operator()(int n, int i) const {
        return entries[static_cast<std::size_t>(n) * kNumLevels + static_cast<std::size_t>(i)];
    }
};

DesignMatrix build_design_matrix(const LevelTable &table, int n_max);

} // namespace photongen

#endif
