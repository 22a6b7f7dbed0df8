#ifndef PHOTONGEN_METRICS_HPP
#define PHOTONGEN_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "photongen/pmf.hpp"

namespace photongen {

/// Elementwise comparison of two truncated pmfs. The last entry of
/// per_n_delta is the difference of the tail masses, so full-support and
/// truncated distributions compare honestly.
struct ComparisonReport {
    double tvd = 0.0;                ///< half the L1 distance, tail included
    std::vector<double> per_n_delta; ///< p_n - q_n for each n, then tail delta
    double worst_set_mass = 0.0;     ///< sum of positive deltas (= tvd)
};

/// Total-variation distance; the shorter pmf is zero-padded and tails are
/// compared as one extra bin.
ComparisonReport total_variation(const PhotonPMF &p, const PhotonPMF &q);

/// <n(n-1)> / <n>^2 from the stored probabilities. Refuses tails >= 1e-6
/// (the moments would silently underestimate) with a DomainError that cites
/// the offending tail mass.
double g2_zero_from_pmf(const PhotonPMF &pmf);

/// 1 + sigma2 / mu^2 — the zero-delay autocorrelation of intensity-modulated
/// light with intensity mean mu and variance sigma2.
double g2_zero_from_intensity(double mu, double sigma2);

/// Ceiling of g2(0) achievable with intensity dynamic range d (in dB):
/// (1+d)^2 / (4d) with d = 10^(db/10).
double max_g2(double dynamic_range_db);

/// Photon-number correlation between the two outputs of a balanced splitter
/// illuminated by light of intensity mean mu and variance sigma2:
/// C = 1/(1 + 2 mu/sigma2); 0 for deterministic intensity.
double correlation_param(double mu, double sigma2);

/// Pointwise multinomial confidence band around a model pmf at a given
/// number of observation windows: p_n +- k sqrt(p_n (1-p_n) / N), clipped
/// to [0, 1].
struct ConfidenceBand {
    std::vector<double> lo;
    std::vector<double> hi;
};
ConfidenceBand confidence_band(const PhotonPMF &p_model, std::uint64_t window_count,
                               double k_sigma);

/// Sample Pearson correlation coefficient of two equally long series.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

} // namespace photongen

#endif
