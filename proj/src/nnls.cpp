#include "photongen/nnls.hpp"

#include <limits>
#include <vector>

#include "photongen/errors.hpp"

namespace photongen {

namespace {

/// Least-squares solution restricted to the passive columns (ascending order).
Eigen::VectorXd solve_passive(const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
                              const std::vector<int> &passive, bool min_norm) {
    Eigen::MatrixXd sub(A.rows(), static_cast<Eigen::Index>(passive.size()));
    for (std::size_t k = 0; k < passive.size(); ++k)
        sub.col(static_cast<Eigen::Index>(k)) = A.col(passive[k]);
    if (!min_norm)
        return sub.colPivHouseholderQr().solve(b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(Eigen::NumTraits<double>::epsilon() *
                     static_cast<double>(std::max(sub.rows(), sub.cols())));
    return svd.solve(b);
}

/// Lawson-Hanson inner loop after column j entered the passive set: move x
/// toward the unconstrained solution on the passive columns, dropping
/// variables driven to zero, until the solution is feasible. Returns false
/// without touching x or in_passive when j is numerically degenerate (its
/// first unconstrained coefficient is not positive, so entering j cannot
/// improve the fit).
bool inner_loop(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, Eigen::VectorXd &x,
                std::vector<char> &in_passive, int j, bool min_norm, int inner_cap) {
    bool first_inner = true;
    for (int inner = 0;; ++inner) {
        if (inner > inner_cap)
            throw NumericalError("nnls: inner iteration cap exceeded",
                                 static_cast<std::size_t>(j));

        std::vector<int> passive;
        for (int i = 0; i < static_cast<int>(in_passive.size()); ++i)
            if (in_passive[static_cast<std::size_t>(i)])
                passive.push_back(i);
        const Eigen::VectorXd z = solve_passive(A, b, passive, min_norm);

        double z_min = std::numeric_limits<double>::infinity();
        double z_at_j = 0.0;
        for (std::size_t k = 0; k < passive.size(); ++k) {
            z_min = std::min(z_min, z[static_cast<Eigen::Index>(k)]);
            if (passive[k] == j)
                z_at_j = z[static_cast<Eigen::Index>(k)];
        }

        if (z_min > 0.0) {
            x.setZero();
            for (std::size_t k = 0; k < passive.size(); ++k)
                x[passive[k]] = z[static_cast<Eigen::Index>(k)];
            return true;
        }

        if (first_inner && z_at_j <= 0.0) {
            in_passive[static_cast<std::size_t>(j)] = 0;
            return false;
        }
        first_inner = false;

        // Line search toward z until the first passive variable hits zero.
        double alpha = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (std::size_t k = 0; k < passive.size(); ++k) {
            const double zi = z[static_cast<Eigen::Index>(k)];
            if (zi <= 0.0) {
                const double xi = x[passive[k]];
                const double ratio = xi / (xi - zi);
                if (ratio < alpha) {
                    alpha = ratio;
                    leaving = passive[k];
                }
            }
        }
        for (std::size_t k = 0; k < passive.size(); ++k) {
            const int i = passive[k];
            x[i] = (1.0 - alpha) * x[i] + alpha * z[static_cast<Eigen::Index>(k)];
        }
        x[leaving] = 0.0;
        in_passive[static_cast<std::size_t>(leaving)] = 0;
        for (int i = 0; i < static_cast<int>(in_passive.size()); ++i)
            if (in_passive[static_cast<std::size_t>(i)] && x[i] <= 0.0) {
                x[i] = 0.0;
                in_passive[static_cast<std::size_t>(i)] = 0;
            }
    }
}

} // namespace

NnlsResult nnls(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, const NnlsOptions &opts) {
    const int n = static_cast<int>(A.cols());
    if (A.rows() != b.size())
        throw DomainError("nnls: rhs length must equal the matrix row count");

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
    std::vector<char> banned(static_cast<std::size_t>(n), 0);

    double max_col_norm = 0.0;
    for (int i = 0; i < n; ++i)
        max_col_norm = std::max(max_col_norm, A.col(i).norm());
    const double grad_tol = opts.grad_tol_scale * max_col_norm * b.norm();

    const int outer_cap = 3 * n;
    const int inner_cap = 30 + 10 * n;
    int outer = 0;

    for (;;) {
        const Eigen::VectorXd grad = A.transpose() * (b - A * x);

        int j = -1;
        double best = grad_tol;
        for (int i = 0; i < n; ++i)
            if (!in_passive[static_cast<std::size_t>(i)] &&
                !banned[static_cast<std::size_t>(i)] && grad[i] > best) {
                best = grad[i];
                j = i;
            }
        if (j < 0)
            break;
        if (++outer > outer_cap)
            throw NumericalError("nnls: outer iteration cap exceeded",
                                 static_cast<std::size_t>(j));

        in_passive[static_cast<std::size_t>(j)] = 1;
        if (inner_loop(A, b, x, in_passive, j, opts.min_norm_inner, inner_cap)) {
            std::fill(banned.begin(), banned.end(), 0);
        } else {
            // Keep the degenerate column out until x changes again.
            banned[static_cast<std::size_t>(j)] = 1;
        }
    }

    return {x, (A * x - b).norm(), outer};
}

NnlsResult nnls_polish(const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
                       const Eigen::VectorXd &x0, double target_residual) {
    const int n = static_cast<int>(A.cols());
    if (A.rows() != b.size() || x0.size() != n)
        throw DomainError("nnls_polish: inconsistent dimensions");

    const int inner_cap = 30 + 10 * n;
    const int round_cap = 64;
    Eigen::VectorXd x = x0;
    double residual = (A * x - b).norm();

    for (int round = 0; round < round_cap && residual >= target_residual; ++round) {
        Eigen::VectorXd best_x;
        double best_residual = residual;
        for (int j = 0; j < n; ++j) {
            if (x[j] > 0.0)
                continue;
            Eigen::VectorXd trial = x;
            std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
            int support = 0;
            for (int i = 0; i < n; ++i)
                if (trial[i] > 0.0) {
                    in_passive[static_cast<std::size_t>(i)] = 1;
                    ++support;
                }
            if (support >= static_cast<int>(A.rows()))
                break; // the rank bound leaves no room for another column
            in_passive[static_cast<std::size_t>(j)] = 1;
            bool ok;
            try {
                ok = inner_loop(A, b, trial, in_passive, j, true, inner_cap);
            } catch (const NumericalError &) {
                ok = false;
            }
            if (!ok)
                continue;
            const double r = (A * trial - b).norm();
            if (r < best_residual * (1.0 - 1e-9) && r < best_residual) {
                best_residual = r;
                best_x = std::move(trial);
            }
        }
        if (best_x.size() == 0)
            break;
        x = std::move(best_x);
        residual = best_residual;
    }
    return {x, residual, 0};
}

} // namespace photongen
