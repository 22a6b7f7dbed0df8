#ifndef PHOTONGEN_NNLS_HPP
#define PHOTONGEN_NNLS_HPP

#include <Eigen/Dense>

namespace photongen {

struct NnlsResult {
    Eigen::VectorXd x;    ///< non-negative minimizer of |A x - b|
    double residual_norm; ///< |A x - b| at the solution
    int outer_iterations; ///< active-set insertions performed
};

struct NnlsOptions {
    /// A column enters the passive set only while its gradient exceeds
    /// grad_tol_scale x max column norm x |b|. The default keeps the
    /// active-set walk short and the support minimal; 0 accepts any strictly
    /// positive gradient and grinds the residual to the machine-level
    /// optimum at the cost of a possibly larger support.
    double grad_tol_scale = 1e-12;
    /// Inner least-squares solves via SVD (minimum-norm solution) instead of
    /// column-pivoted QR (basic solution). On near-rank-deficient passive
    /// sets the QR walk can stall short of the optimum; the min-norm walk is
    /// slower but reaches further. Used by the refinement pass of
    /// invert_statistics.
    bool min_norm_inner = false;
};

/// Non-negative least squares via the Lawson-Hanson active-set method.
/// Ties in the gradient selection break toward the lowest column index, so
/// the result is deterministic. Throws NumericalError if the outer iteration
/// count exceeds 3 x columns.
NnlsResult nnls(const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
                const NnlsOptions &opts = {});

/// Escape hatch for numerical stalls of the active-set walk: starting from a
/// feasible solution x0, greedily forces single zero columns into the
/// support (running the usual inner loop) and keeps the entry that reduces
/// the residual the most; repeats until the residual drops below
/// target_residual or no forced entry improves. Deterministic; never returns
/// a worse solution than x0. outer_iterations is reported as 0.
NnlsResult nnls_polish(const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
                       const Eigen::VectorXd &x0, double target_residual);

} // namespace photongen

#endif
