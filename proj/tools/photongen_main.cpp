/// photongen — design, simulate and verify photon-number statistics produced
/// by pseudo-thermal intensity modulation.
///
/// Subcommands:
///   invert   derive a 128-level modulation program from target statistics
///   run      simulate the counting experiment and compare with the model
///   g2       simulate the two-arm correlator over a delay grid
///   forward  photon statistics of an intensity model (no simulation)
///   compare  total-variation distance between two PMF CSV files

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "photongen/config.hpp"
#include "photongen/errors.hpp"
#include "photongen/inversion.hpp"
#include "photongen/io.hpp"
#include "photongen/mandel.hpp"
#include "photongen/metrics.hpp"
#include "photongen/modsim.hpp"

namespace {

using namespace photongen;

/// Output directory priority: --out flag, config "outputs", PHOTONGEN_OUTDIR,
/// current directory. Created if missing.
std::filesystem::path resolve_outdir(const std::string &flag_out, const ExperimentConfig &cfg) {
    std::filesystem::path dir;
    if (!flag_out.empty())
        dir = flag_out;
    else if (!cfg.outputs.empty())
        dir = cfg.outputs;
    else if (const char *env = std::getenv("PHOTONGEN_OUTDIR"); env && *env)
        dir = env;
    else
        dir = ".";
    std::filesystem::create_directories(dir);
    return dir;
}

/// An InversionResult that records a table not obtained by inversion, with
/// the residual against the table's own photon statistics (machine-level by
/// construction) so the program file stays self-consistent.
InversionResult describe_table(const LevelTable &table, int n_max) {
    const PhotonPMF self = forward_discrete(table, n_max);
    const DesignMatrix A = build_design_matrix(table, n_max);
    double ss = 0.0;
    for (int n = 0; n <= n_max + 1; ++n) {
        double acc = 0.0;
        for (int i = 0; i < kNumLevels; ++i)
            acc += A(n, i) * table.probs[static_cast<std::size_t>(i)];
        const double target = n <= n_max ? self.probs[static_cast<std::size_t>(n)] : 1.0;
        ss += (acc - target) * (acc - target);
    }
    InversionResult r;
    r.table = table;
    r.residual_norm = std::sqrt(ss);
    r.support_size = 0;
    for (double p : table.probs)
        if (p > 0.0)
            ++r.support_size;
    r.exact = r.residual_norm < kExactnessThreshold;
    return r;
}

/// Inverts the resolved photon target at the configured w_max, or over the
/// configured scan range.
InversionResult invert_from_config(const ExperimentConfig &cfg) {
    const PhotonPMF target = resolve_photon_target(*cfg.photon_target, cfg.n_max);
    if (cfg.w_max)
        return invert_statistics(target, *cfg.w_max);
    if (cfg.w_scan)
        return scan_wmax(target, cfg.w_scan->lo, cfg.w_scan->hi, cfg.w_scan->steps).best;
    throw ConfigError("photon target needs 'w_max' or 'w_scan' to choose the level grid");
}

/// The modulation program a simulation should run: an explicit program file
/// wins, then inversion of a photon target, then discretization of an
/// intensity target.
InversionResult program_for(const ExperimentConfig &cfg) {
    if (cfg.program_path)
        return read_program_json(*cfg.program_path);
    if (cfg.photon_target)
        return invert_from_config(cfg);
    if (!cfg.w_max)
        throw ConfigError("intensity target needs 'w_max' to fix the level grid");
    return describe_table(discretize(*cfg.intensity_target, *cfg.w_max), cfg.n_max);
}

/// The statistics the measured counts are compared against: the photon
/// target itself, or the photon statistics of the discretized program.
PhotonPMF model_for(const ExperimentConfig &cfg, const LevelTable &table) {
    if (cfg.photon_target)
        return resolve_photon_target(*cfg.photon_target, cfg.n_max);
    return forward_discrete(table, cfg.n_max);
}

int cmd_invert(const std::string &config_path, const std::string &flag_out) {
    const ExperimentConfig cfg = load_config(config_path);
    if (!cfg.photon_target)
        throw ConfigError("invert needs a photon target (target.type = \"photon\")");
    const auto outdir = resolve_outdir(flag_out, cfg);
    const InversionResult result = invert_from_config(cfg);
    write_program_json((outdir / "program.json").string(), result);
    std::cout << "w_max = " << format_full(result.table.w_max) << '\n'
              << "residual_norm = " << format_full(result.residual_norm) << '\n'
              << "support_size = " << result.support_size << '\n'
              << "exact = " << (result.exact ? "true" : "false") << '\n';
    return result.exact ? 0 : 1;
}

/// One counting simulation plus its comparison artifacts. `suffix`
/// distinguishes the optional ideal-detector companion run.
void run_and_report(const ExperimentConfig &cfg, const LevelTable &table,
                    const DetectorParams &det, int threads,
                    const std::filesystem::path &outdir, const std::string &suffix) {
    const CountHistogram hist = run_counting(table, cfg.timeline, det, cfg.seed, threads);
    const PhotonPMF data = hist.to_pmf();
    const PhotonPMF model = model_for(cfg, table);
    const ComparisonReport report = total_variation(data, model);
    const ConfidenceBand band = confidence_band(model, hist.window_count, 2.0);

    write_histogram_csv((outdir / ("hist" + suffix + ".csv")).string(), hist);
    write_report_json((outdir / ("report" + suffix + ".json")).string(), report,
                      hist.window_count);
    write_pmf_bars_csv((outdir / ("pmf_bars" + suffix + ".csv")).string(), model, data);
    write_delta_csv((outdir / ("delta" + suffix + ".csv")).string(), report, model, band);
    std::cout << "windows" << suffix << " = " << hist.window_count << '\n'
              << "tvd" << suffix << " = " << format_full(report.tvd) << '\n';
}

int cmd_run(const std::string &config_path, const std::string &flag_out,
            std::optional<std::uint64_t> flag_seed, int threads, bool ideal) {
    ExperimentConfig cfg = load_config(config_path);
    if (flag_seed)
        cfg.seed = *flag_seed;
    const auto outdir = resolve_outdir(flag_out, cfg);

    if (cfg.timeline.mod_period <= 0.0 ||
        cfg.timeline.total_time < cfg.timeline.mod_period) {
        write_histogram_csv((outdir / "hist.csv").string(), CountHistogram{});
        std::cerr << "error: timeline shorter than one modulation period — nothing to run\n";
        return 1;
    }

    const InversionResult program = program_for(cfg);
    write_program_json((outdir / "program.json").string(), program);
    check_timing_hierarchy(cfg.timeline, cfg.detector.dead_time);

    run_and_report(cfg, program.table, cfg.detector, threads, outdir, "");
    if (ideal)
        run_and_report(cfg, program.table, ideal_detector(), threads, outdir, "_ideal");
    return 0;
}

int cmd_g2(const std::string &config_path, const std::string &flag_out,
           std::optional<std::uint64_t> flag_seed, int threads) {
    ExperimentConfig cfg = load_config(config_path);
    if (flag_seed)
        cfg.seed = *flag_seed;
    if (!cfg.delays)
        throw ConfigError("g2 needs a 'delays' block");
    const auto outdir = resolve_outdir(flag_out, cfg);

    const InversionResult program = program_for(cfg);
    write_program_json((outdir / "program.json").string(), program);
    check_timing_hierarchy(cfg.timeline, cfg.detector.dead_time);

    const auto [arm_a, arm_b] = run_hbt(program.table, cfg.timeline, cfg.detector, cfg.seed,
                                        threads);
    const std::vector<G2Point> trace =
        g2_estimate(arm_a, arm_b, cfg.timeline, cfg.delays->values);
    write_g2_csv((outdir / "g2.csv").string(), trace);

    double peak = 0.0;
    for (const auto &pt : trace)
        peak = std::max(peak, pt.g2);
    std::cout << "clicks_a = " << arm_a.timestamps.size() << '\n'
              << "clicks_b = " << arm_b.timestamps.size() << '\n'
              << "g2_peak = " << format_full(peak) << '\n';
    return 0;
}

int cmd_forward(const std::string &config_path, const std::string &flag_out) {
    const ExperimentConfig cfg = load_config(config_path);
    const auto outdir = resolve_outdir(flag_out, cfg);
    const PhotonPMF pmf = cfg.photon_target
                              ? resolve_photon_target(*cfg.photon_target, cfg.n_max)
                              : forward_continuous(*cfg.intensity_target, cfg.n_max);
    write_pmf_csv((outdir / "pmf.csv").string(), pmf);
    std::cout << "n_max = " << pmf.n_max() << '\n'
              << "mean = " << format_full(pmf_mean(pmf)) << '\n'
              << "tail_mass = " << format_full(pmf.tail_mass) << '\n';
    return 0;
}

int cmd_compare(const std::string &path_a, const std::string &path_b,
                const std::string &json_path) {
    const PhotonPMF a = read_pmf_csv(path_a);
    const PhotonPMF b = read_pmf_csv(path_b);
    const ComparisonReport report = total_variation(a, b);
    if (!json_path.empty())
        write_report_json(json_path, report, 0);
    std::cout << "tvd = " << format_full(report.tvd) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"photon statistics via intensity modulation: design, simulate, verify"};
    app.require_subcommand(1);

    std::string config_path;
    std::string flag_out;
    std::string json_path;
    std::string path_a;
    std::string path_b;
    std::optional<std::uint64_t> flag_seed;
    int threads = 1;
    bool ideal = false;

    auto *invert = app.add_subcommand("invert", "derive a modulation program");
    invert->add_option("config", config_path, "experiment JSON")->required();
    invert->add_option("--out", flag_out, "output directory");

    auto *run = app.add_subcommand("run", "simulate the counting experiment");
    run->add_option("config", config_path, "experiment JSON")->required();
    run->add_option("--out", flag_out, "output directory");
    run->add_option("--seed", flag_seed, "override the config seed");
    run->add_option("--threads", threads, "generation threads (results identical)");
    run->add_flag("--ideal", ideal, "additionally run with an ideal detector");

    auto *g2 = app.add_subcommand("g2", "simulate the two-arm correlator");
    g2->add_option("config", config_path, "experiment JSON")->required();
    g2->add_option("--out", flag_out, "output directory");
    g2->add_option("--seed", flag_seed, "override the config seed");
    g2->add_option("--threads", threads, "generation threads (results identical)");

    auto *forward = app.add_subcommand("forward", "photon statistics of the target");
    forward->add_option("config", config_path, "experiment JSON")->required();
    forward->add_option("--out", flag_out, "output directory");

    auto *compare = app.add_subcommand("compare", "TVD between two PMF CSVs");
    compare->add_option("a", path_a, "first PMF CSV")->required();
    compare->add_option("b", path_b, "second PMF CSV")->required();
    compare->add_option("--json", json_path, "also write a report JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(invert))
            return cmd_invert(config_path, flag_out);
        if (app.got_subcommand(run))
            return cmd_run(config_path, flag_out, flag_seed, threads, ideal);
        if (app.got_subcommand(g2))
            return cmd_g2(config_path, flag_out, flag_seed, threads);
        if (app.got_subcommand(forward))
            return cmd_forward(config_path, flag_out);
        if (app.got_subcommand(compare))
            return cmd_compare(path_a, path_b, json_path);
    } catch (const NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
