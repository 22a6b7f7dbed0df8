#include "photongen/intensity_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "photongen/errors.hpp"

namespace photongen {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double phi(double z) { return boost::math::pdf(kStdNormal, z); }
double Phi(double z) { return boost::math::cdf(kStdNormal, z); }
double PhiInv(double p) { return boost::math::quantile(kStdNormal, p); }

/// Fraction of the untruncated normal below zero.
double negative_mass(const TruncatedNormal &m) { return Phi(-m.mean / m.sigma); }

} // namespace

void validate(const IntensityModel &model) {
    struct Visitor {
        void operator()(const NegativeExponential &m) const {
            if (!(m.mean > 0.0))
                throw DomainError("NegativeExponential: mean must be positive");
        }
        void operator()(const LogNormal &m) const {
            if (!(m.sigma > 0.0))
                throw DomainError("LogNormal: sigma must be positive");
            if (!std::isfinite(m.omega))
                throw DomainError("LogNormal: omega must be finite");
        }
        void operator()(const TruncatedNormal &m) const {
            if (!(m.sigma > 0.0))
                throw DomainError("TruncatedNormal: sigma must be positive");
            if (!(m.mean > 0.0))
                throw DomainError("TruncatedNormal: mean must be positive");
            const double q = negative_mass(m);
            if (!(q < 1e-6))
                throw DomainError("TruncatedNormal: truncated mass " + std::to_string(q) +
                                  " >= 1e-6; choose mean/sigma with negligible negative tail");
        }
        void operator()(const PointMass &m) const {
            if (!(m.w > 0.0))
                throw DomainError("PointMass: w must be positive");
        }
        void operator()(const Mixture &m) const {
            if (m.weights.size() != m.components.size() || m.weights.empty())
                throw DomainError("Mixture: weights and components must match and be non-empty");
            double sum = 0.0;
            for (double w : m.weights) {
                if (!(w >= 0.0))
                    throw DomainError("Mixture: weights must be non-negative");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw DomainError("Mixture: weights sum to " + std::to_string(sum) +
                                  ", expected 1");
            for (const auto &c : m.components)
                validate(c);
        }
    };
    std::visit(Visitor{}, model);
}

double eval_density(const IntensityModel &model, double w) {
    if (w < 0.0)
        throw DomainError("eval_density: w must be non-negative");
    struct Visitor {
        double w;
        double operator()(const NegativeExponential &m) const {
            return std::exp(-w / m.mean) / m.mean;
        }
        double operator()(const LogNormal &m) const {
            if (w <= 0.0)
                return 0.0;
            const double z = (std::log(w) - m.omega) / m.sigma;
            return phi(z) / (m.sigma * w);
        }
        double operator()(const TruncatedNormal &m) const {
            if (w <= 0.0)
                return 0.0;
            const double z = (w - m.mean) / m.sigma;
            return phi(z) / (m.sigma * (1.0 - negative_mass(m)));
        }
        double operator()(const PointMass &) const { return 0.0; }
        double operator()(const Mixture &m) const {
            double d = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i)
                d += m.weights[i] * eval_density(m.components[i], w);
            return d;
        }
    };
    return std::visit(Visitor{w}, model);
}

double model_cdf(const IntensityModel &model, double x) {
    struct Visitor {
        double x;
        double operator()(const NegativeExponential &m) const {
            return x <= 0.0 ? 0.0 : -std::expm1(-x / m.mean);
        }
        double operator()(const LogNormal &m) const {
            return x <= 0.0 ? 0.0 : Phi((std::log(x) - m.omega) / m.sigma);
        }
        double operator()(const TruncatedNormal &m) const {
            if (x <= 0.0)
                return 0.0;
            const double q = negative_mass(m);
            return (Phi((x - m.mean) / m.sigma) - q) / (1.0 - q);
        }
        double operator()(const PointMass &m) const { return x > m.w ? 1.0 : 0.0; }
        double operator()(const Mixture &m) const {
            double c = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i)
                c += m.weights[i] * model_cdf(m.components[i], x);
            return c;
        }
    };
    return std::visit(Visitor{x}, model);
}

double model_mean(const IntensityModel &model) {
    struct Visitor {
        double operator()(const NegativeExponential &m) const { return m.mean; }
        double operator()(const LogNormal &m) const {
            return std::exp(m.omega + 0.5 * m.sigma * m.sigma);
        }
        double operator()(const TruncatedNormal &m) const {
            const double alpha = -m.mean / m.sigma;
            const double lambda = phi(alpha) / (1.0 - Phi(alpha));
            return m.mean + m.sigma * lambda;
        }
        double operator()(const PointMass &m) const { return m.w; }
        double operator()(const Mixture &m) const {
            double mu = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i)
                mu += m.weights[i] * model_mean(m.components[i]);
            return mu;
        }
    };
    return std::visit(Visitor{}, model);
}

double model_variance(const IntensityModel &model) {
    struct Visitor {
        double operator()(const NegativeExponential &m) const { return m.mean * m.mean; }
        double operator()(const LogNormal &m) const {
            const double s2 = m.sigma * m.sigma;
            return std::expm1(s2) * std::exp(2.0 * m.omega + s2);
        }
        double operator()(const TruncatedNormal &m) const {
            const double alpha = -m.mean / m.sigma;
            const double lambda = phi(alpha) / (1.0 - Phi(alpha));
            return m.sigma * m.sigma * (1.0 + alpha * lambda - lambda * lambda);
        }
        double operator()(const PointMass &) const { return 0.0; }
        double operator()(const Mixture &m) const {
            // var = sum w_i (var_i + mu_i^2) - mu^2
            double mu = 0.0, second = 0.0;
            for (std::size_t i = 0; i < m.weights.size(); ++i) {
                const double mi = model_mean(m.components[i]);
                mu += m.weights[i] * mi;
                second += m.weights[i] * (model_variance(m.components[i]) + mi * mi);
            }
            return second - mu * mu;
        }
    };
    return std::visit(Visitor{}, model);
}

SupportBounds model_support(const IntensityModel &model, double eps) {
    if (!(eps > 0.0 && eps < 0.5))
        throw DomainError("model_support: eps must be in (0, 0.5)");
    struct Visitor {
        double eps;
        SupportBounds operator()(const NegativeExponential &m) const {
            return {-m.mean * std::log1p(-eps), -m.mean * std::log(eps)};
        }
        SupportBounds operator()(const LogNormal &m) const {
            const double z = PhiInv(eps);
            return {std::exp(m.omega + m.sigma * z), std::exp(m.omega - m.sigma * z)};
        }
        SupportBounds operator()(const TruncatedNormal &m) const {
            const double z = PhiInv(eps);
            return {std::max(0.0, m.mean + m.sigma * z), m.mean - m.sigma * z};
        }
        SupportBounds operator()(const PointMass &m) const { return {m.w, m.w}; }
        SupportBounds operator()(const Mixture &m) const {
            SupportBounds b{std::numeric_limits<double>::infinity(), 0.0};
            for (const auto &c : m.components) {
                const SupportBounds cb = model_support(c, eps);
                b.lo = std::min(b.lo, cb.lo);
                b.hi = std::max(b.hi, cb.hi);
            }
            return b;
        }
    };
    return std::visit(Visitor{eps}, model);
}

} // namespace photongen
