/// Acceptance suite: eight end-to-end criteria covering inversion exactness
/// on the repository's reference targets, the forward transform against
/// independent oracles, statistical fidelity of the full simulation chain,
/// quantitative detector artifacts, splitter correlations, g2 behavior,
/// heavy-tail reproduction and randomized property checks.
///
/// Prints exactly one "criterion N: PASS/FAIL" line per criterion on stdout;
/// diagnostics go to stderr. The exit code is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "photongen/errors.hpp"
#include "photongen/intensity_model.hpp"
#include "photongen/inversion.hpp"
#include "photongen/level_table.hpp"
#include "photongen/mandel.hpp"
#include "photongen/metrics.hpp"
#include "photongen/modsim.hpp"
#include "photongen/nnls.hpp"
#include "photongen/pmf.hpp"
#include "photongen/rng.hpp"

namespace {

using namespace photongen;
using Clock = std::chrono::steady_clock;

/// Collects expectation failures for one criterion and reports them on
/// stderr as they happen.
struct Check {
    bool ok = true;

    void expect(bool condition, const std::string &what) {
        if (!condition) {
            ok = false;
            std::cerr << "  FAILED: " << what << '\n';
        }
    }

    void expect_near(double got, double want, double tol, const std::string &what) {
        if (!(std::abs(got - want) <= tol)) {
            ok = false;
            std::cerr << "  FAILED: " << what << ": got " << got << ", want " << want
                      << " +- " << tol << '\n';
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Redirects std::cerr into a buffer for the lifetime of the object. The
/// randomized timelines of criterion 8 intentionally violate the timing
/// hierarchy, and thousands of per-run warnings would drown the diagnostics.
class CerrCapture {
  public:
    CerrCapture() : saved_(std::cerr.rdbuf(sink_.rdbuf())) {}
    ~CerrCapture() { std::cerr.rdbuf(saved_); }
    CerrCapture(const CerrCapture &) = delete;
    CerrCapture &operator=(const CerrCapture &) = delete;

  private:
    std::ostringstream sink_;
    std::streambuf *saved_;
};

std::vector<double> as_doubles(std::span<const std::uint32_t> counts) {
    return std::vector<double>(counts.begin(), counts.end());
}

/// Single-level modulation program: constant intensity w in every window.
LevelTable point_table(double w) {
    std::array<double, kNumLevels> probs{};
    probs[0] = 1.0;
    return make_level_table(w, probs);
}

/// Chi-square goodness of fit of a count histogram against Poisson(mean),
/// binned as {0, 1, ..., cut-1, >=cut}. Returns the p-value.
double poisson_pvalue(const CountHistogram &hist, double mean, int cut) {
    const double total = static_cast<double>(hist.window_count);
    std::vector<double> expected(static_cast<std::size_t>(cut) + 1, 0.0);
    double below = 0.0;
    for (int n = 0; n < cut; ++n) {
        expected[static_cast<std::size_t>(n)] = total * poisson_weight(mean, n);
        below += poisson_weight(mean, n);
    }
    expected[static_cast<std::size_t>(cut)] = total * (1.0 - below);

    std::vector<double> observed(static_cast<std::size_t>(cut) + 1, 0.0);
    for (std::size_t n = 0; n < hist.counts_per_n.size(); ++n) {
        const std::size_t bin = std::min(n, static_cast<std::size_t>(cut));
        observed[bin] += static_cast<double>(hist.counts_per_n[n]);
    }

    double chi2 = 0.0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        const double d = observed[b] - expected[b];
        chi2 += d * d / expected[b];
    }
    const boost::math::chi_squared dist(static_cast<double>(cut));
    return boost::math::cdf(boost::math::complement(dist, chi2));
}

/// Brute-force midpoint Riemann sum of the Poisson mixture integral for a
/// log-normal intensity, on a uniform grid in u = ln w spanning +-14 sigma.
/// The Poisson factors are advanced by the recurrence
/// term(n+1) = term(n) * w / (n+1), so no per-element quadrature or special
/// functions are involved: this is an independent oracle for
/// forward_continuous.
std::vector<double> lognormal_riemann_pmf(double omega, double sigma, int n_max, int points) {
    const double lo = omega - 14.0 * sigma;
    const double hi = omega + 14.0 * sigma;
    const double du = (hi - lo) / points;
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * 3.14159265358979323846));

    std::vector<double> w(static_cast<std::size_t>(points));
    std::vector<double> term(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const double u = lo + (j + 0.5) * du;
        const double z = (u - omega) / sigma;
        w[static_cast<std::size_t>(j)] = std::exp(u);
        term[static_cast<std::size_t>(j)] =
            norm * std::exp(-0.5 * z * z) * du * std::exp(-w[static_cast<std::size_t>(j)]);
    }

    std::vector<double> pmf(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 0;; ++n) {
        double sum = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j)
            sum += term[j];
        pmf[static_cast<std::size_t>(n)] = sum;
        if (n == n_max)
            break;
        const double inv = 1.0 / (n + 1);
        for (std::size_t j = 0; j < w.size(); ++j)
            term[j] *= w[j] * inv;
    }
    return pmf;
}

// ---------------------------------------------------------------------------

/// Criterion 1 — the reference inversion targets are recovered exactly:
/// residual below 1e-9, support no larger than n_max + 2, forward round-trip
/// elementwise below 1e-9, under one second per row.
void criterion_1(Check &chk) {
    struct Row {
        const char *name;
        PhotonPMF target;
        double w_max;
    };
    const std::vector<Row> rows = [] {
        std::vector<Row> r;
        r.push_back({"bose_einstein_1", bose_einstein_pmf(1.0, 10), 15.0});
        r.push_back({"bose_einstein_2", bose_einstein_pmf(2.0, 10), 15.0});
        r.push_back({"bose_einstein_10", bose_einstein_pmf(10.0, 10), 20.0});
        r.push_back({"lognormal_1_05", forward_continuous(LogNormal{1.0, 0.5}, 15), 20.0});
        r.push_back({"lognormal_2_1", forward_continuous(LogNormal{2.0, 1.0}, 15), 30.0});
        r.push_back({"mix_exp_normal",
                     forward_continuous(Mixture{{0.25, 0.75},
                                                {NegativeExponential{1.0},
                                                 TruncatedNormal{6.0, 0.5}}},
                                        15),
                     15.0});
        r.push_back({"mix_two_normal",
                     forward_continuous(Mixture{{1.0 / 3.0, 2.0 / 3.0},
                                                {TruncatedNormal{1.5, 0.25},
                                                 TruncatedNormal{7.0, 0.25}}},
                                        13),
                     15.0});
        r.push_back({"uniform_0_20", truncated(uniform_truncated_pmf(0, 20), 10), 20.0});
        return r;
    }();

    for (const Row &row : rows) {
        const auto t0 = Clock::now();
        const InversionResult result = invert_statistics(row.target, row.w_max);
        const double elapsed = seconds_since(t0);
        const int n_max = row.target.n_max();

        chk.expect(result.exact, std::string(row.name) + ": not exact");
        chk.expect(result.residual_norm < 1e-9,
                   std::string(row.name) + ": residual " +
                       std::to_string(result.residual_norm));
        chk.expect(result.support_size <= n_max + 2,
                   std::string(row.name) + ": support " +
                       std::to_string(result.support_size) + " > n_max + 2");

        const PhotonPMF back = forward_discrete(result.table, n_max);
        double max_err = 0.0;
        for (int n = 0; n <= n_max; ++n)
            max_err = std::max(max_err,
                               std::abs(back.probs[static_cast<std::size_t>(n)] -
                                        row.target.probs[static_cast<std::size_t>(n)]));
        chk.expect(max_err < 1e-9,
                   std::string(row.name) + ": round-trip error " + std::to_string(max_err));
        chk.expect(elapsed < 1.0,
                   std::string(row.name) + ": took " + std::to_string(elapsed) + " s");
        std::cerr << "  " << row.name << ": residual " << result.residual_norm << ", support "
                  << result.support_size << ", " << elapsed << " s\n";
    }
}

/// Criterion 2 — the forward transform agrees with independent references:
/// negative-exponential intensity gives the analytic Bose-Einstein pmf within
/// 1e-9 elementwise, and a heavy-tailed log-normal matches a million-point
/// brute-force Riemann sum within 1e-8 up to n = 500.
void criterion_2(Check &chk) {
    for (const double mean : {0.5, 1.0, 2.0, 10.0}) {
        const PhotonPMF numeric = forward_continuous(NegativeExponential{mean}, 30);
        const PhotonPMF analytic = bose_einstein_pmf(mean, 30);
        double max_err = 0.0;
        for (std::size_t n = 0; n < numeric.probs.size(); ++n)
            max_err = std::max(max_err, std::abs(numeric.probs[n] - analytic.probs[n]));
        chk.expect(max_err < 1e-9, "negative exponential mean " + std::to_string(mean) +
                                       ": max error " + std::to_string(max_err));
        chk.expect(std::abs(numeric.tail_mass - analytic.tail_mass) < 1e-7,
                   "negative exponential mean " + std::to_string(mean) + ": tail mismatch");
    }

    const auto t0 = Clock::now();
    const PhotonPMF numeric = forward_continuous(LogNormal{2.0, 1.0}, 500);
    const std::vector<double> oracle = lognormal_riemann_pmf(2.0, 1.0, 500, 1'000'000);
    double max_err = 0.0;
    for (std::size_t n = 0; n < oracle.size(); ++n)
        max_err = std::max(max_err, std::abs(numeric.probs[n] - oracle[n]));
    chk.expect(max_err < 1e-8,
               "log-normal(2,1) vs Riemann oracle: max error " + std::to_string(max_err));
    std::cerr << "  log-normal oracle comparison: max error " << max_err << " in "
              << seconds_since(t0) << " s\n";
}

/// Criterion 3 — end-to-end statistical fidelity: an ideal-detector run of
/// the inverted Bose-Einstein(1) program over one million windows reproduces
/// the target within total-variation distance 5e-3.
void criterion_3(Check &chk) {
    const PhotonPMF target = bose_einstein_pmf(1.0, 10);
    const InversionResult program = invert_statistics(target, 15.0);
    chk.expect(program.exact, "program inversion not exact");

    // One window per modulation period: every window draws a fresh level, so
    // the multinomial sampling bound applies directly.
    const TimelineConfig tl{1e-5, 1e-5, 10.0, 1e-8};
    const CountHistogram hist = run_counting(program.table, tl, ideal_detector(), 301, 2);
    chk.expect(hist.window_count == 1'000'000,
               "window count " + std::to_string(hist.window_count));

    const double tvd = total_variation(hist.to_pmf(), target).tvd;
    chk.expect(tvd < 5e-3, "TVD " + std::to_string(tvd));
    std::cerr << "  TVD over 1e6 windows: " << tvd << '\n';
}

/// Criterion 4 — detector artifacts are quantitatively right:
/// (a) an all-zero detector yields exact Poisson counting,
/// (b) dead-time-only dark runs match the non-paralyzable renewal rate
///     R / (1 + R t_D) within three standard deviations across 50 kcps to
///     1.5 Mcps,
/// (c) 2.35 % afterpulsing raises a low-rate click count by the nominal
///     factor 1.0235 within three standard deviations.
void criterion_4(Check &chk) {
    const DetectorParams all_zero{0.0, 0.0, ExponentialDelay{}, 0.0, 0.0};
    const TimelineConfig tl{1e-5, 1e-5, 10.0, 1e-8};
    const CountHistogram hist = run_counting(point_table(1.0), tl, all_zero, 401, 2);
    const double pval = poisson_pvalue(hist, 1.0, 7);
    chk.expect(pval > 0.001, "Poisson chi-square p-value " + std::to_string(pval));
    std::cerr << "  all-zero detector chi-square p-value: " << pval << '\n';

    const double dead = 23e-9;
    const double duration = 10.0;
    int i = 0;
    for (const double rate : {5e4, 1e5, 5e5, 1e6, 1.5e6}) {
        DetectorParams det{dead, 0.0, ExponentialDelay{}, 0.0, rate};
        const ClickStream clicks =
            apply_detector({}, det, duration, 402 + static_cast<std::uint64_t>(i++));
        const double expected = duration * rate / (1.0 + rate * dead);
        const double sigma = std::sqrt(duration * rate / std::pow(1.0 + rate * dead, 3));
        chk.expect_near(static_cast<double>(clicks.timestamps.size()), expected, 3.0 * sigma,
                        "dead-time rate at " + std::to_string(rate) + " cps");
        std::cerr << "  dead-time " << rate << " cps: " << clicks.timestamps.size() << " vs "
                  << expected << " +- " << sigma << '\n';
    }

    const double p_ap = 0.0235;
    const double rate = 5e4;
    const double span = 20.0;
    DetectorParams with_ap{dead, p_ap, ExponentialDelay{}, 0.0, rate};
    DetectorParams baseline = with_ap;
    baseline.afterpulse_prob = 0.0;
    const double n_ap =
        static_cast<double>(apply_detector({}, with_ap, span, 410).timestamps.size());
    const double n_base =
        static_cast<double>(apply_detector({}, baseline, span, 411).timestamps.size());
    const double factor = n_ap / n_base;
    // Afterpulses cascade geometrically, so the click count variance is
    // R T (1 + p) / (1 - p)^2; the baseline run adds 1/(R T) to the relative
    // variance of the ratio.
    const double n0 = rate * span;
    const double sigma_f =
        std::sqrt(((1.0 + p_ap) / ((1.0 - p_ap) * (1.0 - p_ap)) + 1.0) / n0);
    chk.expect_near(factor, 1.0235, 3.0 * sigma_f, "afterpulse rate factor");
    std::cerr << "  afterpulse factor: " << factor << " (tolerance " << 3.0 * sigma_f << ")\n";
}

/// Criterion 5 — balanced-splitter correlations: thermal light of mean two
/// gives a Pearson correlation of 0.50, a unit-mean log-normal with sigma = 1
/// gives (e-1)/(e+1) = 0.4621, and deterministic intensity gives zero.
void criterion_5(Check &chk) {
    const TimelineConfig tl{1e-5, 1e-5, 20.0, 1e-8};

    struct Setup {
        const char *name;
        LevelTable table;
        double target;
        double tol;
    };
    const std::vector<Setup> setups = [] {
        std::vector<Setup> s;
        s.push_back({"bose_einstein_2", invert_statistics(bose_einstein_pmf(2.0, 10), 15.0).table,
                     0.50, 0.02});
        s.push_back({"lognormal_unit_mean", discretize(LogNormal{-0.5, 1.0}, 60.0),
                     (std::exp(1.0) - 1.0) / (std::exp(1.0) + 1.0), 0.02});
        s.push_back({"poisson", point_table(2.0), 0.0, 0.005});
        return s;
    }();

    std::uint64_t seed = 501;
    for (const Setup &s : setups) {
        // Model-side check first: the program's own intensity moments must
        // already give the expected correlation parameter.
        const double c_model =
            correlation_param(table_mean(s.table), table_variance(s.table));
        chk.expect_near(c_model, s.target, s.tol,
                        std::string(s.name) + ": model correlation parameter");

        const auto [arm_a, arm_b] = run_hbt(s.table, tl, ideal_detector(), seed++, 2);
        const std::vector<double> counts_a = as_doubles(windowed_counts(arm_a, tl));
        const std::vector<double> counts_b = as_doubles(windowed_counts(arm_b, tl));
        const double r = pearson_correlation(counts_a, counts_b);
        chk.expect_near(r, s.target, s.tol, std::string(s.name) + ": sample correlation");
        std::cerr << "  " << s.name << ": model " << c_model << ", sample " << r << '\n';
    }
}

/// Criterion 6 — g2 behavior: thermal programs give g2(0) = 2.00 +- 0.05
/// with the triangular peak of stepwise modulation (1.5 at half a period,
/// 1 at a full period); the two-level maximum-contrast program exceeds
/// g2(0) = 350 under the default detector and stays below the analytic
/// ceiling (1+d)^2/(4d) of the 31.75 dB grid.
void criterion_6(Check &chk) {
    const std::vector<double> delays{0.0, 5e-4, 1e-3};

    struct ThermalRun {
        const char *name;
        double mean;
        double total_time;
    };
    std::uint64_t seed = 601;
    for (const ThermalRun run : {ThermalRun{"bose_einstein_1", 1.0, 600.0},
                                 ThermalRun{"bose_einstein_2", 2.0, 200.0}}) {
        const InversionResult program =
            invert_statistics(bose_einstein_pmf(run.mean, 10), 15.0);
        const TimelineConfig tl{1e-5, 1e-3, run.total_time, 1e-8};
        const auto t0 = Clock::now();
        const auto [arm_a, arm_b] = run_hbt(program.table, tl, ideal_detector(), seed++, 2);
        const std::vector<G2Point> trace = g2_estimate(arm_a, arm_b, tl, delays);
        chk.expect_near(trace[0].g2, 2.0, 0.05, std::string(run.name) + ": g2(0)");
        chk.expect_near(trace[1].g2, 1.5, 0.05,
                        std::string(run.name) + ": g2 at half a period");
        chk.expect_near(trace[2].g2, 1.0, 0.05,
                        std::string(run.name) + ": g2 at one period");
        std::cerr << "  " << run.name << ": g2 = {" << trace[0].g2 << ", " << trace[1].g2
                  << ", " << trace[2].g2 << "}, " << seconds_since(t0) << " s\n";
    }

    // Two-level program at the full dynamic range of the grid: a rare bright
    // level on top of a dim baseline 31.75 dB below it.
    std::array<double, kNumLevels> probs{};
    probs[0] = 6.6e-4;
    probs[kNumLevels - 1] = 1.0 - 6.6e-4;
    const LevelTable table = make_level_table(30.0, probs);

    const double ceiling = max_g2(kDynamicRangeDb);
    chk.expect_near(ceiling, 374.5590811095876, 1e-9, "analytic g2 ceiling");
    const double g2_table = g2_zero_from_intensity(table_mean(table), table_variance(table));
    chk.expect(g2_table <= ceiling + 1e-9, "table g2 above the analytic ceiling");

    const TimelineConfig tl{1e-5, 1e-3, 1800.0, 1e-8};
    const auto t0 = Clock::now();
    const auto [arm_a, arm_b] = run_hbt(table, tl, DetectorParams{}, 603, 2);
    const std::vector<double> zero{0.0};
    const G2Point pt = g2_estimate(arm_a, arm_b, tl, zero)[0];
    chk.expect(pt.g2 > 350.0, "two-level g2(0) = " + std::to_string(pt.g2));
    // Dead time saturates the bright level (~3 % click loss per arm during
    // bright periods), so the detector can only pull the measurement below
    // the program's own g2 — never above it.
    chk.expect(pt.g2 <= g2_table + 5.0 * pt.std_error,
               "two-level g2(0) = " + std::to_string(pt.g2) + " above the program value " +
                   std::to_string(g2_table));
    std::cerr << "  two-level: g2(0) = " << pt.g2 << " +- " << pt.std_error << ", model "
              << g2_table << ", ceiling " << ceiling << ", " << seconds_since(t0) << " s\n";
}

/// Criterion 7 — heavy-tail reproduction: a log-normal(2,1) intensity run
/// with 200 us windows and 2e5 windows lands at least 93 % of the bins with
/// model probability above 1e-5 inside the two-sigma band of the numeric
/// model. Windows within one modulation period share a level draw, so the
/// band variance carries the corresponding clustering term.
void criterion_7(Check &chk) {
    const int n_max = 500;
    const LevelTable table = discretize(LogNormal{2.0, 1.0}, 500.0);
    const TimelineConfig tl{200e-6, 2e-3, 40.0, 1e-8};

    const CountHistogram hist = run_counting(table, tl, ideal_detector(), 701, 2);
    chk.expect(hist.window_count == 200'000,
               "window count " + std::to_string(hist.window_count));

    const PhotonPMF model = forward_discrete(table, n_max);
    const PhotonPMF data = hist.to_pmf();
    const DesignMatrix design = build_design_matrix(table, n_max);
    const double m = windows_per_period(tl);
    const double n_w = static_cast<double>(hist.window_count);

    auto data_p = [&](int n) {
        return n < static_cast<int>(data.probs.size())
                   ? data.probs[static_cast<std::size_t>(n)]
                   : 0.0;
    };

    int eligible = 0;
    int inside = 0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = model.probs[static_cast<std::size_t>(n)];
        if (p <= 1e-5)
            continue;
        double second = 0.0;
        for (int i = 0; i < kNumLevels; ++i)
            second += table.probs[static_cast<std::size_t>(i)] * design(n, i) * design(n, i);
        const double var = (p * (1.0 - p) + (m - 1.0) * (second - p * p)) / n_w;
        ++eligible;
        if (std::abs(data_p(n) - p) <= 2.0 * std::sqrt(var))
            ++inside;
    }
    const double fraction = static_cast<double>(inside) / eligible;
    chk.expect(eligible > 100, "only " + std::to_string(eligible) + " eligible bins");
    chk.expect(fraction >= 0.93,
               "band coverage " + std::to_string(fraction) + " over " +
                   std::to_string(eligible) + " bins");
    std::cerr << "  band coverage: " << inside << "/" << eligible << " = " << fraction << '\n';
}

/// Criterion 8 — randomized property suites, one thousand instances each:
/// NNLS solutions satisfy the KKT conditions, total-variation distance obeys
/// the metric axioms, generated pmfs are normalized, and counting runs are
/// independent of the thread count.
void criterion_8(Check &chk) {
    {
        auto rng = Xoshiro256pp::stream(8001, 1);
        int violations = 0;
        for (int rep = 0; rep < 1000; ++rep) {
            const int rows = 3 + static_cast<int>(rng.next() % 23);
            const int cols = 3 + static_cast<int>(rng.next() % 38);
            Eigen::MatrixXd A(rows, cols);
            Eigen::VectorXd b(rows);
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < cols; ++c)
                    A(r, c) = 2.0 * rng.uniform() - 1.0;
                b(r) = 2.0 * rng.uniform() - 1.0;
            }
            const NnlsResult sol = nnls(A, b);
            const Eigen::VectorXd grad = A.transpose() * (A * sol.x - b);
            const double tol = 1e-8 * std::max(1.0, b.norm());
            for (int c = 0; c < cols; ++c) {
                if (sol.x(c) < 0.0)
                    ++violations;
                else if (sol.x(c) > 0.0 && std::abs(grad(c)) > tol)
                    ++violations;
                else if (sol.x(c) == 0.0 && grad(c) < -tol)
                    ++violations;
            }
        }
        chk.expect(violations == 0,
                   "KKT violations in NNLS: " + std::to_string(violations));
    }

    {
        auto rng = Xoshiro256pp::stream(8002, 2);
        auto random_pmf = [&rng] {
            const int n = 1 + static_cast<int>(rng.next() % 30);
            std::vector<double> p(static_cast<std::size_t>(n) + 1);
            double sum = 0.0;
            for (double &v : p) {
                v = rng.uniform();
                sum += v;
            }
            const double tail_share = 0.2 * rng.uniform();
            for (double &v : p)
                v *= (1.0 - tail_share) / sum;
            return make_photon_pmf(std::move(p), tail_share);
        };
        int violations = 0;
        for (int rep = 0; rep < 1000; ++rep) {
            const PhotonPMF p = random_pmf();
            const PhotonPMF q = random_pmf();
            const PhotonPMF r = random_pmf();
            const ComparisonReport pq = total_variation(p, q);
            if (total_variation(p, p).tvd != 0.0)
                ++violations;
            if (std::abs(pq.tvd - total_variation(q, p).tvd) > 1e-15)
                ++violations;
            if (pq.tvd < 0.0 || pq.tvd > 1.0)
                ++violations;
            if (pq.tvd >
                total_variation(p, r).tvd + total_variation(r, q).tvd + 1e-12)
                ++violations;
            if (std::abs(pq.worst_set_mass - pq.tvd) > 1e-12)
                ++violations;
        }
        chk.expect(violations == 0,
                   "TVD axiom violations: " + std::to_string(violations));
    }

    {
        auto rng = Xoshiro256pp::stream(8003, 3);
        auto mass = [](const PhotonPMF &pmf) {
            return std::accumulate(pmf.probs.begin(), pmf.probs.end(), pmf.tail_mass);
        };
        int violations = 0;
        for (int rep = 0; rep < 250; ++rep) {
            const double mean = 0.1 + 20.0 * rng.uniform();
            const int n_max = 5 + static_cast<int>(rng.next() % 56);
            if (std::abs(mass(bose_einstein_pmf(mean, n_max)) - 1.0) > 1e-12)
                ++violations;
            if (std::abs(mass(poisson_pmf(mean, n_max)) - 1.0) > 1e-12)
                ++violations;

            std::array<double, kNumLevels> probs{};
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) {
                const auto idx = static_cast<std::size_t>(rng.next() % kNumLevels);
                probs[idx] += rng.uniform();
            }
            for (double v : probs)
                sum += v;
            for (double &v : probs)
                v /= sum;
            const LevelTable table = make_level_table(0.5 + 20.0 * rng.uniform(), probs);
            if (std::abs(mass(forward_discrete(table, n_max)) - 1.0) > 1e-10)
                ++violations;

            // Parameter ranges keep the truncated-normal negative tail
            // negligible and the model mass inside the representable range,
            // so discretize neither throws nor warns.
            IntensityModel model;
            double w_max;
            if (rep % 2 == 0) {
                const double exp_mean = 0.2 + 5.0 * rng.uniform();
                model = NegativeExponential{exp_mean};
                w_max = exp_mean * (8.0 + 4.0 * rng.uniform());
            } else {
                const double tn_mean = 3.0 + 5.0 * rng.uniform();
                const double tn_sigma = 0.1 + 0.4 * rng.uniform();
                model = TruncatedNormal{tn_mean, tn_sigma};
                w_max = tn_mean + 6.0 * tn_sigma + 5.0 * rng.uniform();
            }
            const LevelTable projected = discretize(model, w_max);
            double table_sum = 0.0;
            for (double v : projected.probs)
                table_sum += v;
            if (std::abs(table_sum - 1.0) > 1e-10)
                ++violations;
        }
        chk.expect(violations == 0,
                   "pmf normalization violations: " + std::to_string(violations));
    }

    {
        auto rng = Xoshiro256pp::stream(8004, 4);
        const CerrCapture quiet;
        int violations = 0;
        for (int rep = 0; rep < 1000; ++rep) {
            std::array<double, kNumLevels> probs{};
            double sum = 0.0;
            const int atoms = 1 + static_cast<int>(rng.next() % 5);
            for (int k = 0; k < atoms; ++k)
                probs[static_cast<std::size_t>(rng.next() % kNumLevels)] += rng.uniform();
            for (double v : probs)
                sum += v;
            for (double &v : probs)
                v /= sum;
            const LevelTable table = make_level_table(0.5 + 19.5 * rng.uniform(), probs);

            const int wpp = 1 + static_cast<int>(rng.next() % 8);
            const auto periods = 1 + rng.next() % 80;
            const TimelineConfig tl{1e-6, wpp * 1e-6,
                                    static_cast<double>(periods) * wpp * 1e-6, 1e-9};
            DetectorParams det{2e-7 * rng.uniform(), 0.5 * rng.uniform(), ExponentialDelay{},
                               1e-9 * rng.uniform(), 1e5 * rng.uniform()};
            const std::uint64_t seed = rng.next();
            const int threads = 2 + static_cast<int>(rng.next() % 5);

            const CountHistogram one = run_counting(table, tl, det, seed, 1);
            const CountHistogram many = run_counting(table, tl, det, seed, threads);
            if (one.window_count != many.window_count ||
                one.counts_per_n != many.counts_per_n)
                ++violations;
        }
        chk.expect(violations == 0,
                   "thread-count determinism violations: " + std::to_string(violations));
    }
}

} // namespace

int main() {
    struct Criterion {
        int number;
        std::function<void(Check &)> body;
    };
    const std::vector<Criterion> criteria{
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4},
        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}, {8, criterion_8},
    };

    int failures = 0;
    for (const Criterion &c : criteria) {
        const auto t0 = Clock::now();
        Check chk;
        try {
            c.body(chk);
        } catch (const std::exception &e) {
            chk.ok = false;
            std::cerr << "  EXCEPTION: " << e.what() << '\n';
        }
        std::cerr << "criterion " << c.number << " finished in " << seconds_since(t0)
                  << " s\n";
        std::cout << "criterion " << c.number << ": " << (chk.ok ? "PASS" : "FAIL")
                  << std::endl;
        if (!chk.ok)
            ++failures;
    }
    return failures;
}
