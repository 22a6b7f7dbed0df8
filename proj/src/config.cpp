#include "photongen/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "photongen/errors.hpp"
#include "photongen/mandel.hpp"

namespace photongen {

namespace {

using nlohmann::json;

void require_keys(const json &obj, const std::string &where,
                  const std::set<std::string> &allowed,
                  const std::set<std::string> &required = {}) {
    if (!obj.is_object())
        throw ConfigError(where + ": expected a JSON object");
    for (const auto &item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
    for (const auto &key : required)
        if (!obj.contains(key))
            throw ConfigError(where + ": missing required key '" + key + "'");
}

double get_number(const json &obj, const std::string &where, const std::string &key) {
    const auto &v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

int get_int(const json &obj, const std::string &where, const std::string &key) {
    const auto &v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + ": '" + key + "' must be an integer");
    return v.get<int>();
}

IntensityModel parse_model(const json &obj, const std::string &where) {
    if (!obj.is_object() || !obj.contains("family"))
        throw ConfigError(where + ": intensity model needs a 'family' key");
    const std::string family = obj.at("family").get<std::string>();
    if (family == "negative_exponential") {
        require_keys(obj, where, {"family", "mean"}, {"mean"});
        return NegativeExponential{get_number(obj, where, "mean")};
    }
    if (family == "lognormal") {
        require_keys(obj, where, {"family", "omega", "sigma"}, {"omega", "sigma"});
        return LogNormal{get_number(obj, where, "omega"), get_number(obj, where, "sigma")};
    }
    if (family == "normal") {
        require_keys(obj, where, {"family", "mean", "sigma"}, {"mean", "sigma"});
        return TruncatedNormal{get_number(obj, where, "mean"), get_number(obj, where, "sigma")};
    }
    if (family == "point_mass") {
        require_keys(obj, where, {"family", "w"}, {"w"});
        return PointMass{get_number(obj, where, "w")};
    }
    if (family == "mixture") {
        require_keys(obj, where, {"family", "components"}, {"components"});
        const auto &comps = obj.at("components");
        if (!comps.is_array() || comps.empty())
            throw ConfigError(where + ": mixture 'components' must be a non-empty array");
        Mixture mix;
        int k = 0;
        for (const auto &c : comps) {
            const std::string cw = where + ".components[" + std::to_string(k++) + "]";
            require_keys(c, cw, {"weight", "model"}, {"weight", "model"});
            mix.weights.push_back(get_number(c, cw, "weight"));
            mix.components.push_back(parse_model(c.at("model"), cw + ".model"));
        }
        return mix;
    }
    throw ConfigError(where + ": unknown intensity family '" + family + "'");
}

PhotonTarget parse_photon_target(const json &obj, const std::string &where) {
    if (!obj.contains("kind"))
        throw ConfigError(where + ": photon target needs a 'kind' key");
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "bose_einstein") {
        require_keys(obj, where, {"type", "kind", "mean"}, {"mean"});
        return PhotonTargetBoseEinstein{get_number(obj, where, "mean")};
    }
    if (kind == "poisson") {
        require_keys(obj, where, {"type", "kind", "mean"}, {"mean"});
        return PhotonTargetPoisson{get_number(obj, where, "mean")};
    }
    if (kind == "uniform") {
        require_keys(obj, where, {"type", "kind", "n_lo", "n_hi"}, {"n_lo", "n_hi"});
        return PhotonTargetUniform{get_int(obj, where, "n_lo"), get_int(obj, where, "n_hi")};
    }
    if (kind == "explicit") {
        require_keys(obj, where, {"type", "kind", "probs", "tail_mass"}, {"probs"});
        PhotonTargetExplicit t;
        t.probs = obj.at("probs").get<std::vector<double>>();
        t.tail_mass = obj.contains("tail_mass") ? get_number(obj, where, "tail_mass") : 0.0;
        return t;
    }
    if (kind == "from_intensity") {
        require_keys(obj, where, {"type", "kind", "model"}, {"model"});
        return PhotonTargetFromIntensity{parse_model(obj.at("model"), where + ".model")};
    }
    throw ConfigError(where + ": unknown photon target kind '" + kind + "'");
}

AfterpulseDelayModel parse_delay_model(const json &obj, const std::string &where) {
    require_keys(obj, where, {"model", "mean", "edges", "weights", "file"}, {"model"});
    const std::string model = obj.at("model").get<std::string>();
    if (model == "exponential") {
        ExponentialDelay d;
        if (obj.contains("mean"))
            d.mean = get_number(obj, where, "mean");
        return d;
    }
    if (model == "histogram") {
        HistogramDelay d;
        if (obj.contains("file")) {
            std::ifstream in(obj.at("file").get<std::string>());
            if (!in)
                throw ConfigError(where + ": cannot open histogram file");
            // rows: t_lo,t_hi,weight — contiguous ascending bins
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                double lo = 0, hi = 0, wt = 0;
                if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &lo, &hi, &wt) != 3)
                    throw ConfigError(where + ": malformed histogram row '" + line + "'");
                if (d.edges.empty())
                    d.edges.push_back(lo);
                else if (std::abs(d.edges.back() - lo) > 1e-15 + 1e-9 * std::abs(lo))
                    throw ConfigError(where + ": histogram bins must be contiguous");
                d.edges.push_back(hi);
                d.weights.push_back(wt);
            }
        } else {
            if (!obj.contains("edges") || !obj.contains("weights"))
                throw ConfigError(where + ": histogram delay needs 'edges' and 'weights'");
            d.edges = obj.at("edges").get<std::vector<double>>();
            d.weights = obj.at("weights").get<std::vector<double>>();
        }
        return d;
    }
    throw ConfigError(where + ": unknown afterpulse delay model '" + model + "'");
}

} // namespace

PhotonPMF resolve_photon_target(const PhotonTarget &target, int n_max) {
    struct Visitor {
        int n_max;
        PhotonPMF operator()(const PhotonTargetBoseEinstein &t) const {
            return bose_einstein_pmf(t.mean, n_max);
        }
        PhotonPMF operator()(const PhotonTargetPoisson &t) const {
            return poisson_pmf(t.mean, n_max);
        }
        PhotonPMF operator()(const PhotonTargetUniform &t) const {
            return truncated(uniform_truncated_pmf(t.n_lo, t.n_hi), n_max);
        }
        PhotonPMF operator()(const PhotonTargetExplicit &t) const {
            PhotonPMF pmf = make_photon_pmf(t.probs, t.tail_mass);
            if (pmf.n_max() < n_max)
                throw ConfigError("explicit photon target is shorter than n_max");
            return truncated(pmf, n_max);
        }
        PhotonPMF operator()(const PhotonTargetFromIntensity &t) const {
            return forward_continuous(t.model, n_max);
        }
    };
    return std::visit(Visitor{n_max}, target);
}

ExperimentConfig parse_config_json(const std::string &json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_keys(root, "config",
                 {"name", "target", "n_max", "w_max", "w_scan", "timeline", "detector", "seed",
                  "outputs", "program", "delays"},
                 {"target", "n_max"});

    ExperimentConfig cfg;
    if (root.contains("name"))
        cfg.name = root.at("name").get<std::string>();
    cfg.n_max = get_int(root, "config", "n_max");
    if (cfg.n_max < 0)
        throw ConfigError("config: n_max must be non-negative");

    const auto &target = root.at("target");
    if (!target.is_object() || !target.contains("type"))
        throw ConfigError("config.target: needs a 'type' of 'photon' or 'intensity'");
    const std::string type = target.at("type").get<std::string>();
    if (type == "photon") {
        cfg.photon_target = parse_photon_target(target, "config.target");
    } else if (type == "intensity") {
        require_keys(target, "config.target", {"type", "model"}, {"model"});
        cfg.intensity_target = parse_model(target.at("model"), "config.target.model");
        validate(*cfg.intensity_target);
    } else {
        throw ConfigError("config.target: type must be 'photon' or 'intensity'");
    }

    if (root.contains("w_max") && root.contains("w_scan"))
        throw ConfigError("config: give either w_max or w_scan, not both");
    if (root.contains("w_max"))
        cfg.w_max = get_number(root, "config", "w_max");
    if (root.contains("w_scan")) {
        const auto &s = root.at("w_scan");
        require_keys(s, "config.w_scan", {"lo", "hi", "steps"}, {"lo", "hi", "steps"});
        cfg.w_scan = WScan{get_number(s, "config.w_scan", "lo"),
                           get_number(s, "config.w_scan", "hi"),
                           get_int(s, "config.w_scan", "steps")};
    }

    if (root.contains("timeline")) {
        const auto &t = root.at("timeline");
        require_keys(t, "config.timeline",
                     {"window_tau", "mod_period", "total_time", "coincidence_window"});
        if (t.contains("window_tau"))
            cfg.timeline.window_tau = get_number(t, "config.timeline", "window_tau");
        if (t.contains("mod_period"))
            cfg.timeline.mod_period = get_number(t, "config.timeline", "mod_period");
        if (t.contains("total_time"))
            cfg.timeline.total_time = get_number(t, "config.timeline", "total_time");
        if (t.contains("coincidence_window"))
            cfg.timeline.coincidence_window =
                get_number(t, "config.timeline", "coincidence_window");
    }

    if (root.contains("detector")) {
        const auto &d = root.at("detector");
        require_keys(d, "config.detector",
                     {"dead_time", "afterpulse_prob", "afterpulse_delay", "twilight_constant",
                      "dark_rate"});
        if (d.contains("dead_time"))
            cfg.detector.dead_time = get_number(d, "config.detector", "dead_time");
        if (d.contains("afterpulse_prob"))
            cfg.detector.afterpulse_prob = get_number(d, "config.detector", "afterpulse_prob");
        if (d.contains("twilight_constant"))
            cfg.detector.twilight_constant =
                get_number(d, "config.detector", "twilight_constant");
        if (d.contains("dark_rate"))
            cfg.detector.dark_rate = get_number(d, "config.detector", "dark_rate");
        if (d.contains("afterpulse_delay"))
            cfg.detector.afterpulse_delay =
                parse_delay_model(d.at("afterpulse_delay"), "config.detector.afterpulse_delay");
        validate(cfg.detector);
    }

    if (root.contains("seed")) {
        const auto &s = root.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            throw ConfigError("config: seed must be an integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("outputs"))
        cfg.outputs = root.at("outputs").get<std::string>();
    if (root.contains("program"))
        cfg.program_path = root.at("program").get<std::string>();

    if (root.contains("delays")) {
        const auto &d = root.at("delays");
        require_keys(d, "config.delays", {"max", "steps", "values"});
        DelayGrid grid;
        if (d.contains("values")) {
            grid.values = d.at("values").get<std::vector<double>>();
        } else {
            if (!d.contains("max") || !d.contains("steps"))
                throw ConfigError("config.delays: need 'values' or 'max' + 'steps'");
            const double max = get_number(d, "config.delays", "max");
            const int steps = get_int(d, "config.delays", "steps");
            if (!(max > 0.0) || steps < 2)
                throw ConfigError("config.delays: max must be positive, steps >= 2");
            for (int k = 0; k < steps; ++k)
                grid.values.push_back(-max + 2.0 * max * k / (steps - 1));
        }
        if (grid.values.empty())
            throw ConfigError("config.delays: empty delay grid");
        cfg.delays = std::move(grid);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

} // namespace photongen
