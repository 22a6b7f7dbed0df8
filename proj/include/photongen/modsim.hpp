#ifndef PHOTONGEN_MODSIM_HPP
#define PHOTONGEN_MODSIM_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "photongen/level_table.hpp"
#include "photongen/pmf.hpp"

namespace photongen {

/// Timing of the experiment: counting windows of length window_tau tile each
/// modulation period exactly (mod_period must be an integer multiple), and
/// the whole record consists of whole periods.
struct TimelineConfig {
    double window_tau = 10e-6;         ///< detection window, seconds
    double mod_period = 1e-3;          ///< modulation period, seconds
    double total_time = 0.0;           ///< measurement time, seconds
    double coincidence_window = 10e-9; ///< correlator window, seconds
};

/// Windows per period; throws DomainError unless mod_period is an integer
/// multiple of window_tau.
int windows_per_period(const TimelineConfig &cfg);

/// Whole modulation periods that fit in total_time (at least one required).
std::uint64_t period_count(const TimelineConfig &cfg);

/// Warns on stderr when the timing hierarchy
/// dead_time << window_tau << mod_period << total_time is violated
/// (any adjacent ratio below 10).
void check_timing_hierarchy(const TimelineConfig &cfg, double dead_time);

/// Afterpulse delay measured from the end of the dead time. The exponential
/// default is a modeling assumption, not a measured device characteristic;
/// a measured histogram (bin edges + weights) can be supplied instead.
struct ExponentialDelay {
    double mean = 100e-9;
};
struct HistogramDelay {
    std::vector<double> edges;   ///< ascending bin edges, size = weights.size() + 1
    std::vector<double> weights; ///< non-negative relative bin weights
};
using AfterpulseDelayModel = std::variant<ExponentialDelay, HistogramDelay>;

struct DetectorParams {
    double dead_time = 23e-9;      ///< non-paralyzable recovery time, seconds
    double afterpulse_prob = 0.0235;
    AfterpulseDelayModel afterpulse_delay = ExponentialDelay{};
    double twilight_constant = 2e-9; ///< seconds; twilight probability = constant * mean rate
    double dark_rate = 0.0;          ///< counts per second
};

/// A detector that passes photons through untouched.
DetectorParams ideal_detector();

void validate(const DetectorParams &params);

/// Time-tagger record: strictly increasing click times over [0, duration).
struct ClickStream {
    std::vector<double> timestamps;
    double duration = 0.0;
};

/// Tally of per-window click counts: counts_per_n[n] windows contained
/// exactly n clicks.
struct CountHistogram {
    std::vector<std::uint64_t> counts_per_n;
    std::uint64_t window_count = 0;

    PhotonPMF to_pmf() const;
};

/// I.i.d. level indices drawn from the table's probabilities via the alias
/// method; one entry per modulation period. Deterministic given the seed.
std::vector<std::uint32_t> generate_level_sequence(const LevelTable &table,
                                                   std::uint64_t n_periods, std::uint64_t seed);

/// Photon arrival times for the given level sequence: within period p holding
/// level i, arrivals form a homogeneous Poisson process of rate
/// W_i / window_tau. Each period draws from its own RNG substream, so the
/// result is independent of any chunking or threading.
std::vector<double> simulate_arrivals(std::span<const std::uint32_t> sequence,
                                      const LevelTable &table, const TimelineConfig &cfg,
                                      std::uint64_t seed);

/// SPAD response. Non-paralyzable dead time: an arrival within dead_time of
/// the last registered click is lost and does not extend the recovery.
/// Each registered click triggers, with probability afterpulse_prob, an
/// afterpulse at click + dead_time + delay; a twilight pulse fires exactly at
/// click + dead_time with probability twilight_constant times the running
/// mean click rate (clicks before the current one / elapsed time). Dark
/// counts superpose as an independent Poisson process. Afterpulses, twilight
/// pulses and dark counts are clicks like any other: they respect dead time
/// and can trigger further afterpulses.
ClickStream apply_detector(std::span<const double> events, const DetectorParams &params,
                           double duration, std::uint64_t seed);

/// Clicks per window_tau bin over the whole record (windows aligned to
/// period boundaries, i.e. to t = 0).
CountHistogram count_windows(const ClickStream &clicks, const TimelineConfig &cfg);

/// Per-window click counts as a series, for correlation studies.
std::vector<std::uint32_t> windowed_counts(const ClickStream &clicks, const TimelineConfig &cfg);

/// Routes every click independently to one of two streams with probability
/// one half (balanced beam splitter).
std::pair<ClickStream, ClickStream> split_balanced(const ClickStream &clicks,
                                                   std::uint64_t seed);

struct G2Point {
    double delay = 0.0;
    double g2 = 0.0;
    double std_error = 0.0;
    std::uint64_t coincidences = 0;
};

/// Hanbury Brown-Twiss estimator: for each delay, counts pairs (a, b) with
/// |t_b - t_a - delay| <= coincidence_window / 2 and normalizes by the
/// product of singles rates, the coincidence window and the duration.
/// Standard errors assume Poissonian coincidence counts.
std::vector<G2Point> g2_estimate(const ClickStream &a, const ClickStream &b,
                                 const TimelineConfig &cfg, std::span<const double> delays);

/// Expected autocorrelation of stepwise-modulated light with i.i.d. levels:
/// a triangle of base 2 * mod_period on top of the uncorrelated value 1.
double g2_triangle_model(double g2_zero, double delay, double mod_period);

/// Streaming end-to-end simulation: generates photons period by period
/// (periods are processed in parallel chunks when threads > 1), pushes them
/// through the detector in time order, and hands the detected clicks to the
/// sink one chunk at a time, covering [t0, t1). Results are bit-identical
/// for any thread count.
using ChunkSink = std::function<void(std::span<const double> clicks, double t0, double t1)>;
void simulate_chain(const LevelTable &table, const TimelineConfig &cfg,
                    const DetectorParams &det, std::uint64_t seed, int threads,
                    const ChunkSink &sink);

/// simulate_chain reduced to a per-window count histogram.
CountHistogram run_counting(const LevelTable &table, const TimelineConfig &cfg,
                            const DetectorParams &det, std::uint64_t seed, int threads = 1);

/// The physical two-arm chain: photons are split on a balanced beam splitter
/// first, then each arm is detected by its own independent detector (separate
/// dead time, afterpulse and dark-count state). Returns both click streams in
/// full; memory scales with the click count.
std::pair<ClickStream, ClickStream> run_hbt(const LevelTable &table, const TimelineConfig &cfg,
                                            const DetectorParams &det, std::uint64_t seed,
                                            int threads = 1);

} // namespace photongen

#endif
