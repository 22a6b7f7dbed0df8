#ifndef PHOTONGEN_CONFIG_HPP
#define PHOTONGEN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "photongen/intensity_model.hpp"
#include "photongen/modsim.hpp"
#include "photongen/pmf.hpp"

namespace photongen {

/// Photon-number target specifications (the "inversion-approach"): resolved
/// to a PhotonPMF truncated at the experiment's n_max.
struct PhotonTargetBoseEinstein {
    double mean;
};
struct PhotonTargetPoisson {
    double mean;
};
struct PhotonTargetUniform {
    int n_lo;
    int n_hi;
};
struct PhotonTargetExplicit {
    std::vector<double> probs;
    double tail_mass;
};
/// Target statistics computed from an intensity model via the forward
/// transform, then inverted — useful for round-trip experiments.
struct PhotonTargetFromIntensity {
    IntensityModel model;
};
using PhotonTarget =
    std::variant<PhotonTargetBoseEinstein, PhotonTargetPoisson, PhotonTargetUniform,
                 PhotonTargetExplicit, PhotonTargetFromIntensity>;

struct WScan {
    double lo;
    double hi;
    int steps;
};

struct DelayGrid {
    std::vector<double> values; ///< explicit delays, seconds
};

/// One experiment = one self-describing JSON file. Exactly one of
/// photon_target / intensity_target is present.
struct ExperimentConfig {
    std::string name;
    std::optional<PhotonTarget> photon_target;
    std::optional<IntensityModel> intensity_target;
    int n_max = 0;
    std::optional<double> w_max;
    std::optional<WScan> w_scan;
    TimelineConfig timeline;
    DetectorParams detector;
    std::uint64_t seed = 1;
    std::string outputs;                     ///< output directory (may be empty)
    std::optional<std::string> program_path; ///< pre-computed modulation program
    std::optional<DelayGrid> delays;         ///< for the g2 command
};

/// Parses and validates a config; rejects unknown keys at every level.
ExperimentConfig load_config(const std::string &path);
ExperimentConfig parse_config_json(const std::string &json_text);

/// Materializes the photon target truncated at n_max (tail mass explicit).
PhotonPMF resolve_photon_target(const PhotonTarget &target, int n_max);

} // namespace photongen

#endif
