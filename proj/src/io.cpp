#include "photongen/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "photongen/errors.hpp"

namespace photongen {

namespace {

std::ofstream open_out(const std::string &path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out)
        throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string &path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        fields.push_back(field);
    return fields;
}

constexpr char kClickMagic[8] = {'P', 'G', 'C', 'L', 'C', 'K', '0', '1'};

} // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_display(double v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_pmf_csv(const std::string &path, const PhotonPMF &pmf) {
    auto out = open_out(path);
    out << "n,p_n,p_display\n";
    for (std::size_t n = 0; n < pmf.probs.size(); ++n)
        out << n << ',' << format_full(pmf.probs[n]) << ',' << format_display(pmf.probs[n])
            << '\n';
    out << "tail," << format_full(pmf.tail_mass) << ',' << format_display(pmf.tail_mass)
        << '\n';
}

PhotonPMF read_pmf_csv(const std::string &path) {
    auto in = open_in(path);
    PhotonPMF pmf;
    std::string line;
    bool have_tail = false;
    std::size_t expected_n = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 2)
            throw IoError("pmf csv: malformed line '" + line + "' in " + path);
        if (fields[0] == "n")
            continue; // header
        if (fields[0] == "tail") {
            pmf.tail_mass = std::stod(fields[1]);
            have_tail = true;
            continue;
        }
        if (have_tail)
            throw IoError("pmf csv: rows after the tail row in " + path);
        if (static_cast<std::size_t>(std::stoul(fields[0])) != expected_n)
            throw IoError("pmf csv: n values must be consecutive from 0 in " + path);
        pmf.probs.push_back(std::stod(fields[1]));
        ++expected_n;
    }
    if (pmf.probs.empty())
        throw IoError("pmf csv: no probability rows in " + path);
    return pmf;
}

void write_histogram_csv(const std::string &path, const CountHistogram &hist) {
    auto out = open_out(path);
    out << "n,windows,p_n\n";
    for (std::size_t n = 0; n < hist.counts_per_n.size(); ++n) {
        const double p = static_cast<double>(hist.counts_per_n[n]) /
                         static_cast<double>(hist.window_count);
        out << n << ',' << hist.counts_per_n[n] << ',' << format_full(p) << '\n';
    }
}

void write_pmf_bars_csv(const std::string &path, const PhotonPMF &model,
                        const PhotonPMF &data) {
    auto out = open_out(path);
    out << "n,p_model,p_data,p_model_display,p_data_display\n";
    const std::size_t len = std::max(model.probs.size(), data.probs.size());
    for (std::size_t n = 0; n < len; ++n) {
        const double pm = n < model.probs.size() ? model.probs[n] : 0.0;
        const double pd = n < data.probs.size() ? data.probs[n] : 0.0;
        out << n << ',' << format_full(pm) << ',' << format_full(pd) << ','
            << format_display(pm) << ',' << format_display(pd) << '\n';
    }
}

void write_delta_csv(const std::string &path, const ComparisonReport &report,
                     const PhotonPMF &model, const ConfidenceBand &band) {
    auto out = open_out(path);
    out << "n,delta,band_lo,band_hi,delta_display\n";
    const std::size_t rows = report.per_n_delta.size();
    for (std::size_t n = 0; n + 1 < rows; ++n) {
        const double d = report.per_n_delta[n];
        const double p = n < model.probs.size() ? model.probs[n] : 0.0;
        const double lo = (n < band.lo.size() ? band.lo[n] : p) - p;
        const double hi = (n < band.hi.size() ? band.hi[n] : p) - p;
        out << n << ',' << format_full(d) << ',' << format_full(lo) << ',' << format_full(hi)
            << ',' << format_display(d) << '\n';
    }
    out << "tail," << format_full(report.per_n_delta.back()) << ",,,"
        << format_display(report.per_n_delta.back()) << '\n';
}

void write_g2_csv(const std::string &path, const std::vector<G2Point> &points) {
    auto out = open_out(path);
    out << "delay_s,g2,std_error,coincidences,g2_display\n";
    for (const auto &pt : points)
        out << format_full(pt.delay) << ',' << format_full(pt.g2) << ','
            << format_full(pt.std_error) << ',' << pt.coincidences << ','
            << format_display(pt.g2) << '\n';
}

void write_report_json(const std::string &path, const ComparisonReport &report,
                       std::uint64_t window_count) {
    nlohmann::json j;
    j["tvd"] = report.tvd;
    j["worst_set_mass"] = report.worst_set_mass;
    j["window_count"] = window_count;
    j["per_n_delta"] = report.per_n_delta;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_program_json(const std::string &path, const InversionResult &result) {
    nlohmann::json j;
    j["w_max"] = result.table.w_max;
    j["levels"] = result.table.levels;
    j["probs"] = result.table.probs;
    j["residual_norm"] = result.residual_norm;
    std::vector<int> support;
    for (int i = 0; i < kNumLevels; ++i)
        if (result.table.probs[static_cast<std::size_t>(i)] > 0.0)
            support.push_back(i);
    j["support"] = support;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

InversionResult read_program_json(const std::string &path) {
    auto in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw IoError("program json: " + std::string(e.what()) + " in " + path);
    }
    InversionResult result;
    try {
        result.table.w_max = j.at("w_max").get<double>();
        const auto levels = j.at("levels").get<std::vector<double>>();
        const auto probs = j.at("probs").get<std::vector<double>>();
        if (levels.size() != kNumLevels || probs.size() != kNumLevels)
            throw IoError("program json: expected 128 levels and probs in " + path);
        std::copy(levels.begin(), levels.end(), result.table.levels.begin());
        std::copy(probs.begin(), probs.end(), result.table.probs.begin());
        result.residual_norm = j.at("residual_norm").get<double>();
    } catch (const nlohmann::json::exception &e) {
        throw IoError("program json: " + std::string(e.what()) + " in " + path);
    }
    validate(result.table);
    result.support_size = 0;
    for (double p : result.table.probs)
        if (p > 0.0)
            ++result.support_size;
    result.exact = result.residual_norm < kExactnessThreshold;
    return result;
}

void write_clicks_bin(const std::string &path, const ClickStream &stream) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kClickMagic, sizeof kClickMagic);
    const auto write_u64 = [&out](std::uint64_t v) {
        char bytes[8];
        for (int i = 0; i < 8; ++i)
            bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        out.write(bytes, 8);
    };
    write_u64(static_cast<std::uint64_t>(std::llround(stream.duration * 1e12)));
    for (double t : stream.timestamps)
        write_u64(static_cast<std::uint64_t>(std::llround(t * 1e12)));
    if (!out)
        throw IoError("click stream: write failed: " + path);
}

ClickStream read_clicks_bin(const std::string &path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    char magic[8];
    if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kClickMagic))
        throw IoError("click stream: bad magic in " + path);
    const auto read_u64 = [&in](std::uint64_t &v) -> bool {
        char bytes[8];
        if (!in.read(bytes, 8))
            return false;
        v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
        return true;
    };
    ClickStream stream;
    std::uint64_t duration_ps = 0;
    if (!read_u64(duration_ps))
        throw IoError("click stream: truncated header in " + path);
    stream.duration = static_cast<double>(duration_ps) * 1e-12;
    std::uint64_t ts = 0;
    while (read_u64(ts))
        stream.timestamps.push_back(static_cast<double>(ts) * 1e-12);
    return stream;
}

} // namespace photongen
