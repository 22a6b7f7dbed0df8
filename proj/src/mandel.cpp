#include "photongen/mandel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "photongen/errors.hpp"

namespace photongen {

double poisson_weight(double w, long long n) {
    if (!(w >= 0.0))
        throw DomainError("poisson_weight: w must be non-negative");
    if (n < 0 || n > 1000000)
        throw DomainError("poisson_weight: n must be in [0, 1e6]");
    if (w == 0.0)
        return n == 0 ? 1.0 : 0.0;
    const double nd = static_cast<double>(n);
    return std::exp(nd * std::log(w) - w - std::lgamma(nd + 1.0));
}

PhotonPMF poisson_pmf(double mean, int n_max) {
    if (!(mean >= 0.0))
        throw DomainError("poisson_pmf: mean must be non-negative");
    if (n_max < 0)
        throw DomainError("poisson_pmf: n_max must be non-negative");
    PhotonPMF pmf;
    pmf.probs.resize(static_cast<std::size_t>(n_max) + 1);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = poisson_weight(mean, n);
        pmf.probs[static_cast<std::size_t>(n)] = p;
        sum += p;
    }
    pmf.tail_mass = std::max(0.0, 1.0 - sum);
    return pmf;
}

PhotonPMF forward_mixture(std::span<const double> levels, std::span<const double> probs,
                          int n_max) {
    if (levels.size() != probs.size() || levels.empty())
        throw DomainError("forward_mixture: levels and probs must match and be non-empty");
    if (n_max < 0)
        throw DomainError("forward_mixture: n_max must be non-negative");
    PhotonPMF pmf;
    pmf.probs.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (probs[i] == 0.0)
            continue;
        for (int n = 0; n <= n_max; ++n)
            pmf.probs[static_cast<std::size_t>(n)] += probs[i] * poisson_weight(levels[i], n);
    }
    for (double p : pmf.probs)
        sum += p;
    pmf.tail_mass = std::max(0.0, 1.0 - sum);
    return pmf;
}

PhotonPMF forward_discrete(const LevelTable &table, int n_max) {
    return forward_mixture(table.levels, table.probs, n_max);
}

namespace {

/// W-interval holding all but < 1e-13 of the Poisson kernel w^n e^-w / n!
/// (a Gamma(n+1) shape): roughly 12 standard deviations around the mean n+1,
/// padded for the skew at small n.
void kernel_bounds(int n, double &lo, double &hi) {
    const double m = n + 1.0;
    const double s = std::sqrt(m);
    lo = std::max(0.0, m - 12.0 * s - 20.0);
    hi = m + 12.0 * s + 40.0;
}

struct ElementIntegrator {
    const QuadratureOptions &opts;

    /// Integrates f over [a, b] adaptively; throws NumericalError tagged with
    /// the element index n when the error estimate misses the tolerance.
    template <typename F> double integrate(F &&f, double a, double b, int n) const {
        if (!(a < b))
            return 0.0;
        double error = 0.0, l1 = 0.0;
        const double q = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            f, a, b, static_cast<unsigned>(opts.max_depth), opts.rel_tol, &error, &l1);
        if (error > opts.rel_tol * l1 && error > 1e-305)
            throw NumericalError("forward_continuous: quadrature did not converge for element " +
                                     std::to_string(n),
                                 static_cast<std::size_t>(n));
        return q;
    }
};

double element_continuous(const IntensityModel &model, int n, const QuadratureOptions &opts);

struct ElementVisitor {
    int n;
    const QuadratureOptions &opts;

    double operator()(const PointMass &m) const { return poisson_weight(m.w, n); }

    double operator()(const Mixture &m) const {
        double p = 0.0;
        for (std::size_t i = 0; i < m.weights.size(); ++i)
            if (m.weights[i] > 0.0)
                p += m.weights[i] * element_continuous(m.components[i], n, opts);
        return p;
    }

    double operator()(const LogNormal &m) const {
        double klo, khi;
        kernel_bounds(n, klo, khi);
        const SupportBounds s = model_support(IntensityModel(m), 1e-14);
        const double a = std::max(klo, s.lo), b = std::min(khi, s.hi);
        if (!(a < b))
            return 0.0;
        // substitute u = ln W: kernel * density * W du
        const double lg = std::lgamma(n + 1.0);
        const double inv_sigma = 1.0 / m.sigma;
        const double norm = inv_sigma / std::sqrt(2.0 * M_PI);
        auto f = [this, lg, inv_sigma, norm, &m](double u) {
            const double z = (u - m.omega) * inv_sigma;
            return std::exp(n * u - std::exp(u) - lg - 0.5 * z * z) * norm;
        };
        return ElementIntegrator{opts}.integrate(f, std::log(a), std::log(b), n);
    }

    double operator()(const NegativeExponential &m) const {
        return integrate_w(IntensityModel(m), n);
    }

    double operator()(const TruncatedNormal &m) const {
        return integrate_w(IntensityModel(m), n);
    }

  private:
    double integrate_w(const IntensityModel &model, int n_elem) const {
        double klo, khi;
        kernel_bounds(n_elem, klo, khi);
        const SupportBounds s = model_support(model, 1e-14);
        const double a = std::max(klo, s.lo), b = std::min(khi, s.hi);
        if (!(a < b))
            return 0.0;
        const double lg = std::lgamma(n_elem + 1.0);
        auto f = [lg, n_elem, &model](double w) {
            const double lw = n_elem == 0 ? 0.0 : n_elem * std::log(w);
            return std::exp(lw - w - lg) * eval_density(model, w);
        };
        return ElementIntegrator{opts}.integrate(f, a, b, n_elem);
    }
};

double element_continuous(const IntensityModel &model, int n, const QuadratureOptions &opts) {
    return std::visit(ElementVisitor{n, opts}, model);
}

} // namespace

PhotonPMF forward_continuous(const IntensityModel &model, int n_max,
                             const QuadratureOptions &opts) {
    validate(model);
    if (n_max < 0)
        throw DomainError("forward_continuous: n_max must be non-negative");
    PhotonPMF pmf;
    pmf.probs.resize(static_cast<std::size_t>(n_max) + 1);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = element_continuous(model, n, opts);
        pmf.probs[static_cast<std::size_t>(n)] = p;
        sum += p;
    }
    pmf.tail_mass = std::max(0.0, 1.0 - sum);
    return pmf;
}

DesignMatrix build_design_matrix(const LevelTable &table, int n_max) {
    if (n_max < 0)
        throw DomainError("build_design_matrix: n_max must be non-negative");
    DesignMatrix mat;
    mat.n_max = n_max;
    mat.levels = table.levels;
    mat.entries.resize(static_cast<std::size_t>(n_max + 2) * kNumLevels);
    for (int n = 0; n <= n_max; ++n)
        for (int i = 0; i < kNumLevels; ++i)
            mat.entries[static_cast<std::size_t>(n) * kNumLevels + static_cast<std::size_t>(i)] =
                poisson_weight(table.levels[static_cast<std::size_t>(i)], n);
    for (int i = 0; i < kNumLevels; ++i)
        mat.entries[static_cast<std::size_t>(n_max + 1) * kNumLevels +
                    static_cast<std::size_t>(i)] = 1.0;
    return mat;
}

} // namespace photongen
