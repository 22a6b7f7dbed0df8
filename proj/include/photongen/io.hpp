#ifndef PHOTONGEN_IO_HPP
#define PHOTONGEN_IO_HPP

#include <string>
#include <vector>

#include "photongen/inversion.hpp"
#include "photongen/metrics.hpp"
#include "photongen/modsim.hpp"
#include "photongen/pmf.hpp"

namespace photongen {

/// Shortest exact decimal representation (17 significant digits) — the fixed
/// formatting that makes re-runs byte-identical.
std::string format_full(double v);
/// Rounded companion column for human-facing plot CSVs.
std::string format_display(double v);

/// PMF CSV: header "n,p_n", one row per n, final row "tail,<mass>". Written
/// files may carry extra display columns; the reader only consumes the first
/// two.
void write_pmf_csv(const std::string &path, const PhotonPMF &pmf);
PhotonPMF read_pmf_csv(const std::string &path);

/// Count histogram CSV: header "n,windows,p_n".
void write_histogram_csv(const std::string &path, const CountHistogram &hist);

/// Plot data for p_n bars: "n,p_model,p_data" plus display columns.
void write_pmf_bars_csv(const std::string &path, const PhotonPMF &model, const PhotonPMF &data);

/// Plot data for residuals: "n,delta,band_lo,band_hi" plus display columns.
/// The band columns are the model's confidence band re-centered at zero
/// (band minus model probability); the last row ("tail") carries the
/// tail-mass delta with an empty band.
void write_delta_csv(const std::string &path, const ComparisonReport &report,
                     const PhotonPMF &model, const ConfidenceBand &band);

/// g2 trace CSV: "delay_s,g2,std_error,coincidences" plus display columns.
void write_g2_csv(const std::string &path, const std::vector<G2Point> &points);

/// Comparison report JSON: {tvd, worst_set_mass, per_n_delta}.
void write_report_json(const std::string &path, const ComparisonReport &report,
                       std::uint64_t window_count);

/// Modulation program JSON:
/// {w_max, levels: [...], probs: [...], residual_norm, support: [...]}.
void write_program_json(const std::string &path, const InversionResult &result);
InversionResult read_program_json(const std::string &path);

/// Click stream binary: 8-byte magic "PGCLCK01", u64 duration in picoseconds,
/// then one u64 timestamp (picoseconds) per click, all little-endian.
/// Timestamps are quantized to 1 ps on write.
void write_clicks_bin(const std::string &path, const ClickStream &stream);
ClickStream read_clicks_bin(const std::string &path);

} // namespace photongen

#endif
