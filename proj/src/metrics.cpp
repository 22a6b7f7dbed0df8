#include "photongen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photongen/errors.hpp"

namespace photongen {

ComparisonReport total_variation(const PhotonPMF &p, const PhotonPMF &q) {
    validate(p);
    validate(q);
    const std::size_t len = std::max(p.probs.size(), q.probs.size());
    ComparisonReport report;
    report.per_n_delta.resize(len + 1);
    double abs_sum = 0.0, pos_sum = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        const double pn = n < p.probs.size() ? p.probs[n] : 0.0;
        const double qn = n < q.probs.size() ? q.probs[n] : 0.0;
        const double d = pn - qn;
        report.per_n_delta[n] = d;
        abs_sum += std::abs(d);
        if (d > 0.0)
            pos_sum += d;
    }
    const double tail_delta = p.tail_mass - q.tail_mass;
    report.per_n_delta[len] = tail_delta;
    abs_sum += std::abs(tail_delta);
    if (tail_delta > 0.0)
        pos_sum += tail_delta;
    report.tvd = 0.5 * abs_sum;
    report.worst_set_mass = pos_sum;
    return report;
}

double g2_zero_from_pmf(const PhotonPMF &pmf) {
    if (!(pmf.tail_mass < 1e-6))
        throw DomainError("g2_zero_from_pmf: tail mass " + std::to_string(pmf.tail_mass) +
                          " >= 1e-6, factorial moments would be unreliable; "
                          "extend n_max until the tail is negligible");
    double mean = 0.0, fac2 = 0.0;
    for (std::size_t n = 1; n < pmf.probs.size(); ++n) {
        const double nd = static_cast<double>(n);
        mean += nd * pmf.probs[n];
        fac2 += nd * (nd - 1.0) * pmf.probs[n];
    }
    if (!(mean > 0.0))
        throw DomainError("g2_zero_from_pmf: zero mean photon number");
    return fac2 / (mean * mean);
}

double g2_zero_from_intensity(double mu, double sigma2) {
    if (!(mu > 0.0))
        throw DomainError("g2_zero_from_intensity: mu must be positive");
    if (!(sigma2 >= 0.0))
        throw DomainError("g2_zero_from_intensity: sigma2 must be non-negative");
    return 1.0 + sigma2 / (mu * mu);
}

double max_g2(double dynamic_range_db) {
    if (!(dynamic_range_db >= 0.0))
        throw DomainError("max_g2: dynamic range must be non-negative");
    const double d = std::pow(10.0, dynamic_range_db / 10.0);
    return (1.0 + d) * (1.0 + d) / (4.0 * d);
}

double correlation_param(double mu, double sigma2) {
    if (!(mu > 0.0))
        throw DomainError("correlation_param: mu must be positive");
    if (!(sigma2 >= 0.0))
        throw DomainError("correlation_param: sigma2 must be non-negative");
    if (sigma2 == 0.0)
        return 0.0;
    return 1.0 / (1.0 + 2.0 * mu / sigma2);
}

ConfidenceBand confidence_band(const PhotonPMF &p_model, std::uint64_t window_count,
                               double k_sigma) {
    if (window_count < 1)
        throw DomainError("confidence_band: need at least one window");
    if (!(k_sigma >= 0.0))
        throw DomainError("confidence_band: k_sigma must be non-negative");
    ConfidenceBand band;
    band.lo.resize(p_model.probs.size());
    band.hi.resize(p_model.probs.size());
    const double inv_n = 1.0 / static_cast<double>(window_count);
    for (std::size_t n = 0; n < p_model.probs.size(); ++n) {
        const double p = p_model.probs[n];
        const double half = k_sigma * std::sqrt(p * (1.0 - p) * inv_n);
        band.lo[n] = std::max(0.0, p - half);
        band.hi[n] = std::min(1.0, p + half);
    }
    return band;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("pearson_correlation: need two equally long series");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw DomainError("pearson_correlation: a series is constant");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace photongen
