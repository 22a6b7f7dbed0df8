#ifndef PHOTONGEN_INVERSION_HPP
#define PHOTONGEN_INVERSION_HPP

#include "photongen/level_table.hpp"
#include "photongen/pmf.hpp"

namespace photongen {

/// Euclidean residual below which a solution counts as exact: two orders of
/// magnitude above double-precision accumulation error for these systems,
/// far below any statistical resolution.
inline constexpr double kExactnessThreshold = 1e-9;

struct InversionResult {
    LevelTable table;
    double residual_norm; ///< |A P - b| before renormalization
    int support_size;     ///< number of strictly positive level probabilities
    bool exact;           ///< residual_norm < kExactnessThreshold
};

struct InversionOptions {
    /// Weight of the appended normalization equation sum(P_i) = 1.
    double normalization_weight = 1.0;
};

/// Finds level probabilities whose Poisson mixture reproduces the target
/// statistics on n <= n_max: solves the (n_max+2) x 128 system (design matrix
/// plus normalization row) by NNLS with rhs (p_0 .. p_n_max, 1), then
/// renormalizes. The target's tail mass is deliberately unconstrained.
/// A non-exact result is not an error; NNLS convergence failures propagate.
InversionResult invert_statistics(const PhotonPMF &target, double w_max,
                                  const InversionOptions &opts = {});

struct ScanResult {
    InversionResult best;
    double chosen_w_max;
};

/// Runs invert_statistics over a geometric grid of `steps` w_max values in
/// [w_lo, w_hi] and keeps the smallest residual; ties break toward smaller
/// w_max (less detector saturation for the same statistics).
ScanResult scan_wmax(const PhotonPMF &target, double w_lo, double w_hi, int steps,
                     const InversionOptions &opts = {});

} // namespace photongen

#endif
