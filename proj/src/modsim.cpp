#include "photongen/modsim.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <queue>
#include <string>
#include <thread>

#include "photongen/errors.hpp"
#include "photongen/rng.hpp"

namespace photongen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Substream identifiers; every stage of the chain owns its own generator so
// draw sequences never depend on scheduling.
enum : std::uint64_t {
    kStreamLevels = 1,
    kStreamArrivals = 2,
    kStreamDetector = 3,
    kStreamDark = 4,
    kStreamSplit = 5,
};

constexpr std::uint64_t kPeriodsPerChunk = 4096;

} // namespace

int windows_per_period(const TimelineConfig &cfg) {
    if (!(cfg.window_tau > 0.0) || !(cfg.mod_period > 0.0))
        throw DomainError("TimelineConfig: window_tau and mod_period must be positive");
    const double ratio = cfg.mod_period / cfg.window_tau;
    const auto k = static_cast<long long>(std::llround(ratio));
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * ratio)
        throw DomainError("TimelineConfig: mod_period must be an integer multiple of window_tau");
    return static_cast<int>(k);
}

std::uint64_t period_count(const TimelineConfig &cfg) {
    if (!(cfg.mod_period > 0.0))
        throw DomainError("TimelineConfig: mod_period must be positive");
    if (!(cfg.total_time > 0.0))
        throw DomainError("TimelineConfig: total_time must be positive");
    const auto n = static_cast<std::uint64_t>(cfg.total_time / cfg.mod_period + 1e-9);
    if (n < 1)
        throw DomainError("TimelineConfig: total_time shorter than one modulation period");
    return n;
}

void check_timing_hierarchy(const TimelineConfig &cfg, double dead_time) {
    const auto warn = [](const char *a, const char *b, double ratio) {
        std::cerr << "warning: timing hierarchy " << a << " << " << b
                  << " is weak (ratio " << ratio << " < 10)\n";
    };
    if (dead_time > 0.0 && cfg.window_tau / dead_time < 10.0)
        warn("dead_time", "window_tau", cfg.window_tau / dead_time);
    if (cfg.mod_period / cfg.window_tau < 10.0)
        warn("window_tau", "mod_period", cfg.mod_period / cfg.window_tau);
    if (cfg.total_time / cfg.mod_period < 10.0)
        warn("mod_period", "total_time", cfg.total_time / cfg.mod_period);
}

DetectorParams ideal_detector() {
    DetectorParams p;
    p.dead_time = 0.0;
    p.afterpulse_prob = 0.0;
    p.twilight_constant = 0.0;
    p.dark_rate = 0.0;
    return p;
}

void validate(const DetectorParams &params) {
    if (!(params.dead_time >= 0.0))
        throw DomainError("DetectorParams: dead_time must be non-negative");
    if (!(params.afterpulse_prob >= 0.0 && params.afterpulse_prob < 1.0))
        throw DomainError("DetectorParams: afterpulse_prob must be in [0, 1)");
    if (!(params.twilight_constant >= 0.0))
        throw DomainError("DetectorParams: twilight_constant must be non-negative");
    if (!(params.dark_rate >= 0.0))
        throw DomainError("DetectorParams: dark_rate must be non-negative");
    if (const auto *h = std::get_if<HistogramDelay>(&params.afterpulse_delay)) {
        if (h->edges.size() != h->weights.size() + 1 || h->weights.empty())
            throw DomainError("HistogramDelay: need edges.size() == weights.size() + 1");
        double sum = 0.0;
        for (std::size_t i = 0; i < h->weights.size(); ++i) {
            if (!(h->weights[i] >= 0.0))
                throw DomainError("HistogramDelay: negative weight");
            if (!(h->edges[i + 1] > h->edges[i]) || !(h->edges[i] >= 0.0))
                throw DomainError("HistogramDelay: edges must be non-negative and ascending");
            sum += h->weights[i];
        }
        if (!(sum > 0.0))
            throw DomainError("HistogramDelay: all weights are zero");
    } else if (std::get<ExponentialDelay>(params.afterpulse_delay).mean < 0.0) {
        throw DomainError("ExponentialDelay: mean must be non-negative");
    }
}

PhotonPMF CountHistogram::to_pmf() const {
    if (window_count == 0)
        throw DomainError("CountHistogram: no windows recorded");
    PhotonPMF pmf;
    pmf.probs.resize(counts_per_n.size());
    for (std::size_t n = 0; n < counts_per_n.size(); ++n)
        pmf.probs[n] =
            static_cast<double>(counts_per_n[n]) / static_cast<double>(window_count);
    pmf.tail_mass = 0.0;
    return pmf;
}

std::vector<std::uint32_t> generate_level_sequence(const LevelTable &table,
                                                   std::uint64_t n_periods,
                                                   std::uint64_t seed) {
    if (n_periods < 1)
        throw DomainError("generate_level_sequence: need at least one period");
    validate(table);
    const AliasTable alias(std::span<const double>(table.probs.data(), table.probs.size()));
    auto rng = Xoshiro256pp::stream(seed, kStreamLevels);
    std::vector<std::uint32_t> seq(n_periods);
    for (auto &s : seq)
        s = alias.sample(rng);
    return seq;
}

namespace {

/// Appends the Poisson arrivals of periods [p_lo, p_hi) to `out`.
void arrivals_for_periods(std::span<const std::uint32_t> sequence, const LevelTable &table,
                          const TimelineConfig &cfg, std::uint64_t seed, std::uint64_t p_lo,
                          std::uint64_t p_hi, std::vector<double> &out) {
    for (std::uint64_t p = p_lo; p < p_hi; ++p) {
        const double w = table.levels[sequence[p]];
        if (w <= 0.0)
            continue;
        const double mean_gap = cfg.window_tau / w;
        const double t0 = static_cast<double>(p) * cfg.mod_period;
        const double t1 = t0 + cfg.mod_period;
        auto rng = Xoshiro256pp::stream(seed, kStreamArrivals, p);
        double t = t0 + rng.exponential(mean_gap);
        while (t < t1) {
            out.push_back(t);
            t += rng.exponential(mean_gap);
        }
    }
}

/// Parallel per-period generation; output is ordered by period regardless of
/// the thread count because threads own contiguous period ranges.
void generate_chunk(std::span<const std::uint32_t> sequence, const LevelTable &table,
                    const TimelineConfig &cfg, std::uint64_t seed, std::uint64_t p_lo,
                    std::uint64_t p_hi, int threads, std::vector<double> &out) {
    out.clear();
    const std::uint64_t count = p_hi - p_lo;
    const int k = std::max(1, std::min<int>(threads, static_cast<int>(
                                                         std::min<std::uint64_t>(count, 64))));
    if (k == 1) {
        arrivals_for_periods(sequence, table, cfg, seed, p_lo, p_hi, out);
        return;
    }
    std::vector<std::vector<double>> parts(static_cast<std::size_t>(k));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(k));
    for (int w = 0; w < k; ++w) {
        const std::uint64_t a = p_lo + count * static_cast<std::uint64_t>(w) /
                                           static_cast<std::uint64_t>(k);
        const std::uint64_t b = p_lo + count * static_cast<std::uint64_t>(w + 1) /
                                           static_cast<std::uint64_t>(k);
        workers.emplace_back([&, a, b, w] {
            arrivals_for_periods(sequence, table, cfg, seed, a, b,
                                 parts[static_cast<std::size_t>(w)]);
        });
    }
    for (auto &t : workers)
        t.join();
    for (const auto &part : parts)
        out.insert(out.end(), part.begin(), part.end());
}

/// Stateful SPAD model; feed() may be called repeatedly with consecutive
/// chunks and produces exactly the clicks in [previous cut, chunk_end).
class DetectorSim {
  public:
    DetectorSim(const DetectorParams &params, double duration, std::uint64_t seed,
                std::uint64_t arm)
        : p_(params), duration_(duration),
          click_rng_(Xoshiro256pp::stream(seed, kStreamDetector, arm)),
          dark_rng_(Xoshiro256pp::stream(seed, kStreamDark, arm)) {
        validate(p_);
        next_dark_ = p_.dark_rate > 0.0 ? dark_rng_.exponential(1.0 / p_.dark_rate) : kInf;
    }

    void feed(std::span<const double> photons, double chunk_end, std::vector<double> &out) {
        std::size_t i = 0;
        for (;;) {
            const double t_photon = i < photons.size() ? photons[i] : kInf;
            const double t_ap = afterpulses_.empty() ? kInf : afterpulses_.top();
            // Priority at equal times: twilight (it sits exactly at the end
            // of the dead time), then afterpulse, then photon, then dark.
            double t = pending_twilight_;
            int source = 0;
            if (t_ap < t) {
                t = t_ap;
                source = 1;
            }
            if (t_photon < t) {
                t = t_photon;
                source = 2;
            }
            if (next_dark_ < t) {
                t = next_dark_;
                source = 3;
            }
            if (t >= chunk_end)
                break;
            switch (source) {
            case 0:
                pending_twilight_ = kInf;
                break;
            case 1:
                afterpulses_.pop();
                break;
            case 2:
                ++i;
                break;
            default:
                next_dark_ += dark_rng_.exponential(1.0 / p_.dark_rate);
                break;
            }
            if (t >= dead_until_ && t < duration_)
                register_click(t, out);
        }
    }

  private:
    void register_click(double t, std::vector<double> &out) {
        out.push_back(t);
        const std::uint64_t clicks_before = clicks_++;
        dead_until_ = t + p_.dead_time;
        if (click_rng_.uniform() < p_.afterpulse_prob)
            afterpulses_.push(dead_until_ + draw_delay());
        // Running mean click rate excludes the current click so the first
        // click (t ~ 0) cannot produce a singular rate estimate.
        const double rate = t > 0.0 ? static_cast<double>(clicks_before) / t : 0.0;
        const double p_twilight = std::min(1.0, p_.twilight_constant * rate);
        if (click_rng_.uniform() < p_twilight) {
            pending_twilight_ = dead_until_ > t
                                    ? dead_until_
                                    : std::nextafter(t, kInf); // keep clicks strictly ordered
        }
    }

    double draw_delay() {
        if (const auto *e = std::get_if<ExponentialDelay>(&p_.afterpulse_delay))
            return click_rng_.exponential(e->mean);
        const auto &h = std::get<HistogramDelay>(p_.afterpulse_delay);
        double total = 0.0;
        for (double w : h.weights)
            total += w;
        double u = click_rng_.uniform() * total;
        std::size_t bin = 0;
        while (bin + 1 < h.weights.size() && u > h.weights[bin]) {
            u -= h.weights[bin];
            ++bin;
        }
        return h.edges[bin] +
               click_rng_.uniform() * (h.edges[bin + 1] - h.edges[bin]);
    }

    DetectorParams p_;
    double duration_;
    Xoshiro256pp click_rng_;
    Xoshiro256pp dark_rng_;
    double dead_until_ = -kInf;
    double pending_twilight_ = kInf;
    double next_dark_ = kInf;
    std::priority_queue<double, std::vector<double>, std::greater<>> afterpulses_;
    std::uint64_t clicks_ = 0;
};

} // namespace

std::vector<double> simulate_arrivals(std::span<const std::uint32_t> sequence,
                                      const LevelTable &table, const TimelineConfig &cfg,
                                      std::uint64_t seed) {
    if (sequence.empty())
        throw DomainError("simulate_arrivals: empty level sequence");
    windows_per_period(cfg); // validates the tiling
    std::vector<double> out;
    arrivals_for_periods(sequence, table, cfg, seed, 0, sequence.size(), out);
    return out;
}

ClickStream apply_detector(std::span<const double> events, const DetectorParams &params,
                           double duration, std::uint64_t seed) {
    if (!(duration > 0.0))
        throw DomainError("apply_detector: duration must be positive");
    ClickStream stream;
    stream.duration = duration;
    DetectorSim sim(params, duration, seed, 0);
    sim.feed(events, duration, stream.timestamps);
    return stream;
}

namespace {

/// Incremental per-window tally shared by count_windows and the streaming
/// pipeline. Clicks must arrive in non-decreasing time order.
class WindowCounter {
  public:
    WindowCounter(double window_tau, std::uint64_t total_windows)
        : tau_(window_tau), total_windows_(total_windows) {}

    void add(double t) {
        auto idx = static_cast<std::uint64_t>(t / tau_);
        if (idx >= total_windows_)
            idx = total_windows_ - 1; // guard fp round at the very edge
        if (idx != current_ || run_ == 0) {
            commit();
            current_ = idx;
        }
        ++run_;
    }

    CountHistogram finish() {
        commit();
        hist_.window_count = total_windows_;
        if (hist_.counts_per_n.empty())
            hist_.counts_per_n.resize(1);
        hist_.counts_per_n[0] += total_windows_ - occupied_;
        return std::move(hist_);
    }

  private:
    void commit() {
        if (run_ == 0)
            return;
        if (hist_.counts_per_n.size() <= run_)
            hist_.counts_per_n.resize(run_ + 1);
        ++hist_.counts_per_n[run_];
        ++occupied_;
        run_ = 0;
    }

    double tau_;
    std::uint64_t total_windows_;
    std::uint64_t current_ = 0;
    std::uint64_t run_ = 0;
    std::uint64_t occupied_ = 0;
    CountHistogram hist_;
};

std::uint64_t stream_window_count(const ClickStream &clicks, const TimelineConfig &cfg) {
    if (!(clicks.duration > 0.0))
        throw DomainError("count_windows: stream has no duration");
    const auto windows = static_cast<std::uint64_t>(
        std::llround(clicks.duration / cfg.window_tau));
    if (windows < 1)
        throw DomainError("count_windows: duration shorter than one window");
    return windows;
}

} // namespace

CountHistogram count_windows(const ClickStream &clicks, const TimelineConfig &cfg) {
    WindowCounter counter(cfg.window_tau, stream_window_count(clicks, cfg));
    for (double t : clicks.timestamps)
        counter.add(t);
    return counter.finish();
}

std::vector<std::uint32_t> windowed_counts(const ClickStream &clicks, const TimelineConfig &cfg) {
    const std::uint64_t windows = stream_window_count(clicks, cfg);
    std::vector<std::uint32_t> counts(windows, 0);
    for (double t : clicks.timestamps) {
        auto idx = static_cast<std::uint64_t>(t / cfg.window_tau);
        if (idx >= windows)
            idx = windows - 1;
        ++counts[idx];
    }
    return counts;
}

std::pair<ClickStream, ClickStream> split_balanced(const ClickStream &clicks,
                                                   std::uint64_t seed) {
    auto rng = Xoshiro256pp::stream(seed, kStreamSplit);
    ClickStream a, b;
    a.duration = b.duration = clicks.duration;
    for (double t : clicks.timestamps)
        (rng.bernoulli(0.5) ? a : b).timestamps.push_back(t);
    return {std::move(a), std::move(b)};
}

std::vector<G2Point> g2_estimate(const ClickStream &a, const ClickStream &b,
                                 const TimelineConfig &cfg, std::span<const double> delays) {
    if (a.timestamps.empty() || b.timestamps.empty())
        throw DomainError("g2_estimate: empty click stream");
    if (std::abs(a.duration - b.duration) > 1e-12 * std::max(a.duration, b.duration))
        throw DomainError("g2_estimate: streams have different durations");
    const double w = cfg.coincidence_window;
    if (!(w > 0.0))
        throw DomainError("g2_estimate: coincidence window must be positive");
    const double duration = a.duration;
    const double norm = duration / (static_cast<double>(a.timestamps.size()) *
                                    static_cast<double>(b.timestamps.size()) * w);
    std::vector<G2Point> points;
    points.reserve(delays.size());
    for (double delay : delays) {
        std::uint64_t coincidences = 0;
        std::size_t lo = 0, hi = 0;
        const auto &tb = b.timestamps;
        for (const double ta : a.timestamps) {
            const double lo_edge = ta + delay - 0.5 * w;
            const double hi_edge = ta + delay + 0.5 * w;
            while (lo < tb.size() && tb[lo] < lo_edge)
                ++lo;
            if (hi < lo)
                hi = lo;
            while (hi < tb.size() && tb[hi] <= hi_edge)
                ++hi;
            coincidences += hi - lo;
        }
        G2Point pt;
        pt.delay = delay;
        pt.coincidences = coincidences;
        pt.g2 = static_cast<double>(coincidences) * norm;
        pt.std_error = coincidences > 0
                           ? pt.g2 / std::sqrt(static_cast<double>(coincidences))
                           : 0.0;
        points.push_back(pt);
    }
    return points;
}

double g2_triangle_model(double g2_zero, double delay, double mod_period) {
    const double overlap = std::max(0.0, 1.0 - std::abs(delay) / mod_period);
    return 1.0 + (g2_zero - 1.0) * overlap;
}

void simulate_chain(const LevelTable &table, const TimelineConfig &cfg,
                    const DetectorParams &det, std::uint64_t seed, int threads,
                    const ChunkSink &sink) {
    validate(table);
    validate(det);
    windows_per_period(cfg);
    check_timing_hierarchy(cfg, det.dead_time);
    const std::uint64_t n_periods = period_count(cfg);
    const double duration = static_cast<double>(n_periods) * cfg.mod_period;
    const auto sequence = generate_level_sequence(table, n_periods, seed);

    DetectorSim detector(det, duration, seed, 0);
    std::vector<double> photons, clicks;
    for (std::uint64_t p0 = 0; p0 < n_periods; p0 += kPeriodsPerChunk) {
        const std::uint64_t p1 = std::min(n_periods, p0 + kPeriodsPerChunk);
        const double t0 = static_cast<double>(p0) * cfg.mod_period;
        const double t1 = static_cast<double>(p1) * cfg.mod_period;
        generate_chunk(sequence, table, cfg, seed, p0, p1, threads, photons);
        clicks.clear();
        detector.feed(photons, t1, clicks);
        sink(clicks, t0, t1);
    }
}

CountHistogram run_counting(const LevelTable &table, const TimelineConfig &cfg,
                            const DetectorParams &det, std::uint64_t seed, int threads) {
    const std::uint64_t n_periods = period_count(cfg);
    const auto wpp = static_cast<std::uint64_t>(windows_per_period(cfg));
    WindowCounter counter(cfg.window_tau, n_periods * wpp);
    simulate_chain(table, cfg, det, seed, threads,
                   [&](std::span<const double> clicks, double, double) {
                       for (double t : clicks)
                           counter.add(t);
                   });
    return counter.finish();
}

std::pair<ClickStream, ClickStream> run_hbt(const LevelTable &table, const TimelineConfig &cfg,
                                            const DetectorParams &det, std::uint64_t seed,
                                            int threads) {
    validate(table);
    validate(det);
    windows_per_period(cfg);
    check_timing_hierarchy(cfg, det.dead_time);
    const std::uint64_t n_periods = period_count(cfg);
    const double duration = static_cast<double>(n_periods) * cfg.mod_period;
    const auto sequence = generate_level_sequence(table, n_periods, seed);

    auto split_rng = Xoshiro256pp::stream(seed, kStreamSplit);
    DetectorSim det_a(det, duration, seed, 0);
    DetectorSim det_b(det, duration, seed, 1);
    ClickStream a, b;
    a.duration = b.duration = duration;

    std::vector<double> photons, arm_a, arm_b;
    for (std::uint64_t p0 = 0; p0 < n_periods; p0 += kPeriodsPerChunk) {
        const std::uint64_t p1 = std::min(n_periods, p0 + kPeriodsPerChunk);
        const double t1 = static_cast<double>(p1) * cfg.mod_period;
        generate_chunk(sequence, table, cfg, seed, p0, p1, threads, photons);
        arm_a.clear();
        arm_b.clear();
        for (double t : photons)
            (split_rng.bernoulli(0.5) ? arm_a : arm_b).push_back(t);
        det_a.feed(arm_a, t1, a.timestamps);
        det_b.feed(arm_b, t1, b.timestamps);
    }
    return {std::move(a), std::move(b)};
}

} // namespace photongen
