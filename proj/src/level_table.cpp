#include "photongen/level_table.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "photongen/errors.hpp"

namespace photongen {

std::array<double, kNumLevels> level_intensities(double w_max) {
    if (!(w_max > 0.0))
        throw DomainError("level_intensities: w_max must be positive");
    std::array<double, kNumLevels> levels;
    for (int i = 0; i < kNumLevels; ++i)
        levels[static_cast<std::size_t>(i)] = w_max * std::pow(10.0, -kLevelStepDb * i / 10.0);
    return levels;
}

void validate(const LevelTable &table) {
    const auto expected = level_intensities(table.w_max);
    for (int i = 0; i < kNumLevels; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (std::abs(table.levels[u] - expected[u]) > 1e-12 * expected[u])
            throw DomainError("LevelTable: level " + std::to_string(i) +
                              " deviates from the 0.25 dB grid");
    }
    double sum = 0.0;
    for (int i = 0; i < kNumLevels; ++i) {
        const double p = table.probs[static_cast<std::size_t>(i)];
        if (!(p >= 0.0))
            throw DomainError("LevelTable: negative probability at level " + std::to_string(i));
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw DomainError("LevelTable: probabilities sum to " + std::to_string(sum) +
                          ", expected 1");
}

LevelTable make_level_table(double w_max, const std::array<double, kNumLevels> &probs) {
    LevelTable table;
    table.w_max = w_max;
    table.levels = level_intensities(w_max);
    table.probs = probs;
    validate(table);
    return table;
}

double range_coverage(const IntensityModel &model, double w_max) {
    const auto levels = level_intensities(w_max);
    // cdf is P(W < x); nudge the upper edge so an atom exactly at W_0 counts.
    return model_cdf(model, levels[0] * (1.0 + 1e-12)) -
           model_cdf(model, levels[kNumLevels - 1]);
}

LevelTable discretize(const IntensityModel &model, double w_max) {
    validate(model);
    LevelTable table;
    table.w_max = w_max;
    table.levels = level_intensities(w_max);

    // Geometric midpoints m_i between levels i and i+1 (decreasing). Level i
    // collects the model mass of [m_i, m_{i-1}); the extremes absorb the rest.
    std::array<double, kNumLevels - 1> mids;
    for (int i = 0; i < kNumLevels - 1; ++i) {
        const auto u = static_cast<std::size_t>(i);
        mids[u] = std::sqrt(table.levels[u] * table.levels[u + 1]);
    }

    double total = 0.0;
    for (int i = 0; i < kNumLevels; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double hi_cdf =
            (i == 0) ? 1.0 : model_cdf(model, mids[u - 1]);
        const double lo_cdf =
            (i == kNumLevels - 1) ? 0.0 : model_cdf(model, mids[u]);
        table.probs[u] = std::max(0.0, hi_cdf - lo_cdf);
        total += table.probs[u];
    }

    const double coverage = range_coverage(model, w_max);
    if (coverage < 0.5)
        std::cerr << "warning: intensity model has only " << coverage * 100.0
                  << "% of its mass inside the representable range [" << table.levels.back()
                  << ", " << table.levels.front() << "]\n";

    if (!(total > 0.0))
        throw NumericalError("discretize: model mass vanished on the level grid");
    for (auto &p : table.probs)
        p /= total;
    return table;
}

double table_mean(const LevelTable &table) {
    double mu = 0.0;
    for (int i = 0; i < kNumLevels; ++i) {
        const auto u = static_cast<std::size_t>(i);
        mu += table.probs[u] * table.levels[u];
    }
    return mu;
}

double table_variance(const LevelTable &table) {
    const double mu = table_mean(table);
    double second = 0.0;
    for (int i = 0; i < kNumLevels; ++i) {
        const auto u = static_cast<std::size_t>(i);
        second += table.probs[u] * table.levels[u] * table.levels[u];
    }
    return second - mu * mu;
}

} // namespace photongen
