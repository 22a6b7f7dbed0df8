#include "photongen/inversion.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "photongen/errors.hpp"
#include "photongen/mandel.hpp"
#include "photongen/nnls.hpp"

namespace photongen {

InversionResult invert_statistics(const PhotonPMF &target, double w_max,
                                  const InversionOptions &opts) {
    validate(target);
    if (!(w_max > 0.0))
        throw DomainError("invert_statistics: w_max must be positive");
    if (!(opts.normalization_weight > 0.0))
        throw DomainError("invert_statistics: normalization weight must be positive");

    const int n_max = target.n_max();
    LevelTable table;
    table.w_max = w_max;
    table.levels = level_intensities(w_max);
    table.probs.fill(0.0);

    const DesignMatrix design = build_design_matrix(table, n_max);
    Eigen::MatrixXd A(design.rows(), kNumLevels);
    for (int r = 0; r < design.rows(); ++r)
        for (int c = 0; c < kNumLevels; ++c)
            A(r, c) = design(r, c);
    A.row(n_max + 1) *= opts.normalization_weight;

    Eigen::VectorXd b(design.rows());
    for (int r = 0; r <= n_max; ++r)
        b[r] = target.probs[static_cast<std::size_t>(r)];
    b[n_max + 1] = opts.normalization_weight;

    NnlsResult sol = nnls(A, b);
    if (sol.residual_norm >= kExactnessThreshold) {
        // The default active-set walk can stall short of the optimum on
        // near-rank-deficient systems. Grind further with a zero gradient
        // tolerance and min-norm inner solves, then force entries past any
        // remaining stall; both passes are best-effort and never replace a
        // better solution.
        try {
            NnlsResult refined = nnls(A, b, {0.0, true});
            if (refined.residual_norm < sol.residual_norm)
                sol = std::move(refined);
        } catch (const NumericalError &) {
        }
        if (sol.residual_norm >= kExactnessThreshold) {
            NnlsResult polished = nnls_polish(A, b, sol.x, kExactnessThreshold);
            if (polished.residual_norm < sol.residual_norm)
                sol = std::move(polished);
        }
    }

    double sum = 0.0;
    int support = 0;
    for (int i = 0; i < kNumLevels; ++i) {
        const double v = sol.x[i];
        sum += v;
        if (v > 0.0)
            ++support;
    }
    if (!(sum > 0.0))
        throw NumericalError("invert_statistics: NNLS returned the zero vector");
    for (int i = 0; i < kNumLevels; ++i)
        table.probs[static_cast<std::size_t>(i)] = sol.x[i] / sum;

    InversionResult result;
    result.table = table;
    result.residual_norm = sol.residual_norm;
    result.support_size = support;
    result.exact = sol.residual_norm < kExactnessThreshold;
    return result;
}

ScanResult scan_wmax(const PhotonPMF &target, double w_lo, double w_hi, int steps,
                     const InversionOptions &opts) {
    if (!(0.0 < w_lo && w_lo < w_hi))
        throw DomainError("scan_wmax: need 0 < w_lo < w_hi");
    if (steps < 2)
        throw DomainError("scan_wmax: need at least 2 steps");

    ScanResult best;
    bool have = false;
    const double log_ratio = std::log(w_hi / w_lo);
    for (int k = 0; k < steps; ++k) {
        const double w = w_lo * std::exp(log_ratio * k / (steps - 1));
        InversionResult r = invert_statistics(target, w, opts);
        if (!have || r.residual_norm < best.best.residual_norm) {
            best = {std::move(r), w};
            have = true;
        }
    }
    return best;
}

} // namespace photongen
