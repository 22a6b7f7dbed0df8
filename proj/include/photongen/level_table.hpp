#ifndef PHOTONGEN_LEVEL_TABLE_HPP
#define PHOTONGEN_LEVEL_TABLE_HPP

#include <array>

#include "photongen/intensity_model.hpp"

namespace photongen {

inline constexpr int kNumLevels = 128;
inline constexpr double kLevelStepDb = 0.25;
/// W_0 / W_127 = 10^(127 * 0.25 / 10)
inline constexpr double kDynamicRangeDb = kLevelStepDb * (kNumLevels - 1);

/// The modulation program: 128 intensities on a fixed 0.25 dB geometric grid
/// below w_max, each held with probability probs[i] for one modulation period.
struct LevelTable {
    double w_max = 1.0;
    std::array<double, kNumLevels> levels{}; ///< W_i = w_max * 10^(-0.025 i), decreasing
    std::array<double, kNumLevels> probs{};  ///< occupation probabilities, sum to 1
};

/// The fixed grid for a given scale: W_i = w_max * 10^(-kLevelStepDb * i / 10).
std::array<double, kNumLevels> level_intensities(double w_max);

/// Validating constructor; probs must be non-negative and sum to 1 within 1e-10.
LevelTable make_level_table(double w_max, const std::array<double, kNumLevels> &probs);

/// Throws DomainError on violated invariants (grid mismatch, bad probs).
void validate(const LevelTable &table);

/// Probability mass the model places on the representable range [W_127, W_0].
double range_coverage(const IntensityModel &model, double w_max);

/// Projects a continuous intensity model onto the level grid: each level
/// receives the model mass of the interval bounded by the geometric midpoints
/// of adjacent levels (everything above the top midpoint goes to level 0,
/// everything below the bottom one to level 127), then renormalizes.
/// Emits a warning on stderr when more than half of the model's mass lies
/// outside the representable range.
LevelTable discretize(const IntensityModel &model, double w_max);

/// Mean and variance of the discrete intensity distribution.
double table_mean(const LevelTable &table);
double table_variance(const LevelTable &table);

} // namespace photongen

#endif
