#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cachesim/montecarlo.hpp"

namespace cachesim {

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::cfcm: return "cfcm";
        case Scheme::cfcc: return "cfcc";
        case Scheme::cscc: return "cscc";
        case Scheme::uncoded: return "uncoded";
        case Scheme::csc_opt: return "csc-opt";
        case Scheme::cfcm_ga: return "cfcm-ga";
        case Scheme::cfcc_ga: return "cfcc-ga";
    }
    return "?";
}

inline const char* to_string(RateSource s) {
    return s == RateSource::analytic ? "analytic" : "monte-carlo";
}

inline Scheme parse_scheme(const std::string& text) {
    if (text == "cfcm") return Scheme::cfcm;
    if (text == "cfcc") return Scheme::cfcc;
    if (text == "cscc") return Scheme::cscc;
    if (text == "uncoded") return Scheme::uncoded;
    if (text == "csc-opt") return Scheme::csc_opt;
    if (text == "cfcm-ga") return Scheme::cfcm_ga;
    if (text == "cfcc-ga") return Scheme::cfcc_ga;
    throw std::invalid_argument("unknown scheme: " + text);
}

inline RateSource parse_source(const std::string& text) {
    if (text == "analytic") return RateSource::analytic;
    if (text == "monte-carlo") return RateSource::monte_carlo;
    throw std::invalid_argument("unknown source: " + text);
}

// One emitted table row. Gains are always taken against the uncoded analytic
// rate of the same (K, N, M); optional fields stay empty where a quantity is
// undefined (zero rates, analytic rows without trial counts, ...).
struct OutputRow {
    Scheme scheme = Scheme::cfcc;
    RateSource source = RateSource::analytic;
    std::uint32_t num_caches = 0;
    std::uint32_t library_size = 0;
    std::uint32_t cache_capacity = 0;
    std::uint32_t subfiles_per_file = 1;
    double q = 0.0;
    double rate = 0.0;
    std::optional<double> stderr_;
    std::optional<std::uint64_t> trials;
    std::optional<double> gain_additive;
    std::optional<double> gain_multiplicative;
    std::optional<double> large_clique_coverage;
    std::string error;

    bool operator==(const OutputRow&) const = default;
};

inline constexpr const char* kOutputHeader =
    "scheme,source,K,N,M,delta,q,rate,stderr,trials,g_a,g_m,large_clique_coverage";

// Rates and derived quantities are printed with 12 significant digits; the
// parse/serialize pair is a fixpoint at that precision.
inline std::string format_real(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

inline std::string format_optional(const std::optional<double>& value) {
    return value ? format_real(*value) : std::string();
}

inline OutputRow make_output_row(const RatePoint& point, double uncoded_rate,
                                 std::string error = {}) {
    OutputRow row;
    row.scheme = point.scheme;
    row.source = point.source;
    row.num_caches = point.num_caches;
    row.library_size = point.library_size;
    row.cache_capacity = point.cache_capacity;
    row.subfiles_per_file = point.subfiles_per_file;
    row.q = point.library_size == 0
                ? 0.0
                : double(point.cache_capacity) / double(point.library_size);
    row.rate = point.rate;
    if (point.source == RateSource::monte_carlo) {
        row.stderr_ = point.stderr_;
        row.trials = point.trials;
    }
    if (point.rate > 0.0 && uncoded_rate > 0.0) {
        const CodingGains gains = coding_gains(point.rate, uncoded_rate);
        row.gain_additive = gains.additive;
        row.gain_multiplicative = gains.multiplicative;
    }
    row.large_clique_coverage = point.large_clique_coverage;
    row.error = std::move(error);
    return row;
}

inline void write_csv_row(std::ostream& os, const OutputRow& row, bool with_error) {
    std::string error = row.error;
    for (auto& c : error)
        if (c == ',' || c == '\n') c = ';';
    os << to_string(row.scheme) << ',' << to_string(row.source) << ','
       << row.num_caches << ',' << row.library_size << ',' << row.cache_capacity << ','
       << row.subfiles_per_file << ',' << format_real(row.q) << ','
       << format_real(row.rate) << ',' << format_optional(row.stderr_) << ','
       << (row.trials ? std::to_string(*row.trials) : std::string()) << ','
       << format_optional(row.gain_additive) << ','
       << format_optional(row.gain_multiplicative) << ','
       << format_optional(row.large_clique_coverage);
    if (with_error) os << ',' << error;
    os << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<OutputRow>& rows,
                      bool with_error = false) {
    os << kOutputHeader;
    if (with_error) os << ",error";
    os << '\n';
    for (const auto& row : rows) write_csv_row(os, row, with_error);
}

inline std::vector<OutputRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("csv: empty input");
    const std::string header = line;
    const bool with_error = header == std::string(kOutputHeader) + ",error";
    if (!with_error && header != kOutputHeader)
        throw std::invalid_argument("csv: unexpected header: " + header);

    std::vector<OutputRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        const std::size_t expected = with_error ? 14 : 13;
        if (fields.size() != expected)
            throw std::invalid_argument("csv: malformed row: " + line);

        OutputRow row;
        row.scheme = parse_scheme(fields[0]);
        row.source = parse_source(fields[1]);
        row.num_caches = static_cast<std::uint32_t>(std::stoul(fields[2]));
        row.library_size = static_cast<std::uint32_t>(std::stoul(fields[3]));
        row.cache_capacity = static_cast<std::uint32_t>(std::stoul(fields[4]));
        row.subfiles_per_file = static_cast<std::uint32_t>(std::stoul(fields[5]));
        row.q = std::stod(fields[6]);
        row.rate = std::stod(fields[7]);
        if (!fields[8].empty()) row.stderr_ = std::stod(fields[8]);
        if (!fields[9].empty()) row.trials = std::stoull(fields[9]);
        if (!fields[10].empty()) row.gain_additive = std::stod(fields[10]);
        if (!fields[11].empty()) row.gain_multiplicative = std::stod(fields[11]);
        if (!fields[12].empty()) row.large_clique_coverage = std::stod(fields[12]);
        if (with_error) row.error = fields[13];
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::ordered_json to_json(const OutputRow& row) {
    nlohmann::ordered_json j;
    j["scheme"] = to_string(row.scheme);
    j["source"] = to_string(row.source);
    j["K"] = row.num_caches;
    j["N"] = row.library_size;
    j["M"] = row.cache_capacity;
    j["delta"] = row.subfiles_per_file;
    j["q"] = row.q;
    j["rate"] = row.rate;
    j["stderr"] = row.stderr_ ? nlohmann::ordered_json(*row.stderr_) : nullptr;
    j["trials"] = row.trials ? nlohmann::ordered_json(*row.trials) : nullptr;
    j["g_a"] = row.gain_additive ? nlohmann::ordered_json(*row.gain_additive) : nullptr;
    j["g_m"] = row.gain_multiplicative ? nlohmann::ordered_json(*row.gain_multiplicative)
                                       : nullptr;
    j["large_clique_coverage"] =
        row.large_clique_coverage ? nlohmann::ordered_json(*row.large_clique_coverage)
                                  : nullptr;
    if (!row.error.empty()) j["error"] = row.error;
    return j;
}

inline void write_json(std::ostream& os, const std::vector<OutputRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) arr.push_back(to_json(row));
    os << arr.dump(2) << '\n';
}

// Per-trial raw dump, one row per trial.
inline void write_trial_csv(std::ostream& os, const ExperimentSpec& spec,
                            const std::vector<TrialRecord>& records) {
    os << "trial,scheme,K,N,M,delta,rate,n_messages,max_clique\n";
    for (const auto& r : records) {
        os << r.trial << ',' << to_string(spec.scheme) << ',' << spec.cfg.num_caches
           << ',' << spec.cfg.library_size << ',' << spec.cfg.cache_capacity << ','
           << spec.cfg.subfiles_per_file << ',' << format_real(r.rate) << ','
           << r.n_messages << ',' << r.max_clique << '\n';
    }
}

} // namespace cachesim
