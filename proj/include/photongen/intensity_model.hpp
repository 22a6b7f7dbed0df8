#ifndef PHOTONGEN_INTENSITY_MODEL_HPP
#define PHOTONGEN_INTENSITY_MODEL_HPP

#include <variant>
#include <vector>

namespace photongen {

/// P(W) = exp(-W/mean)/mean on W >= 0. Produces Bose-Einstein photon
/// statistics of the same mean.
struct NegativeExponential {
    double mean = 1.0;
};

/// ln W is normally distributed with mean omega and standard deviation sigma.
struct LogNormal {
    double omega = 0.0;
    double sigma = 1.0;
};

/// Normal intensity truncated at W = 0 and renormalized. Only parameter sets
/// with negligible negative mass (Phi(-mean/sigma) < 1e-6) are accepted, so
/// the truncation is a formality rather than a distortion.
struct TruncatedNormal {
    double mean = 1.0;
    double sigma = 1.0;
};

/// Deterministic intensity: all mass at W = w.
struct PointMass {
    double w = 1.0;
};

struct Mixture;

using IntensityModel =
    std::variant<NegativeExponential, LogNormal, TruncatedNormal, PointMass, Mixture>;

/// Convex combination of component models. Weights must be non-negative and
/// sum to 1 within 1e-12. Components may themselves be mixtures.
struct Mixture {
    std::vector<double> weights;
    std::vector<IntensityModel> components;
};

/// Throws DomainError if any parameter is out of range (non-positive scale,
/// excessive truncated mass, unnormalized mixture weights, ...).
void validate(const IntensityModel &model);

/// Density P(W = w) for w >= 0; point masses contribute nothing except at
/// their atom (where the density is not finite — eval_density returns 0 for
/// PointMass everywhere, use model_cdf for masses).
double eval_density(const IntensityModel &model, double w);

/// Left-continuous cumulative distribution P(W < x). The strict inequality
/// makes interval masses cdf(b) - cdf(a) assign an atom sitting exactly on a
/// boundary to the interval whose lower edge it is.
double model_cdf(const IntensityModel &model, double x);

double model_mean(const IntensityModel &model);
double model_variance(const IntensityModel &model);

/// Interval [lo, hi] outside of which the model carries mass < eps on each
/// side (conservative for mixtures: the union of component intervals).
struct SupportBounds {
    double lo;
    double hi;
};
SupportBounds model_support(const IntensityModel &model, double eps);

} // namespace photongen

#endif
