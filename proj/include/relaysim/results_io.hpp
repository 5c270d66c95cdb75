#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relaysim/errors.hpp"
#include "relaysim/experiment.hpp"

namespace relaysim {

enum class OutputFormat { csv, json };

inline constexpr std::string_view csv_header =
    "scheme,n_relays,zeta,rho_db,trials,energy_total_j_per_bit,energy_ms_j_per_bit,energy_relay_j_per_bit,"
    "energy_bs_j_per_bit,ci95_energy,outage_rate,ci95_outage,mean_gamma_size,master_seed";

/// Nine significant digits, the precision of every emitted real.
inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline double round_to_emitted(double v) { return std::strtod(format_real(v).c_str(), nullptr); }

namespace detail {

inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

inline nlohmann::json json_real(const std::optional<double>& v)
{
    return v ? nlohmann::json(round_to_emitted(*v)) : nlohmann::json(nullptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

inline std::optional<double> parse_optional(const std::string& text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    return std::stod(text);
}

inline std::optional<double> json_optional(const nlohmann::json& v)
{
    if (v.is_null()) {
        return std::nullopt;
    }
    return v.get<double>();
}

}  // namespace detail

inline std::string to_csv(const std::vector<ResultRow>& rows)
{
    std::string out(csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.scheme;
        out += ',' + std::to_string(r.n_relays);
        out += ',' + format_real(r.zeta);
        out += ',' + detail::format_optional(r.rho_db);
        out += ',' + std::to_string(r.trials);
        out += ',' + detail::format_optional(r.energy_total_j_per_bit);
        out += ',' + detail::format_optional(r.energy_ms_j_per_bit);
        out += ',' + detail::format_optional(r.energy_relay_j_per_bit);
        out += ',' + detail::format_optional(r.energy_bs_j_per_bit);
        out += ',' + detail::format_optional(r.ci95_energy);
        out += ',' + format_real(r.outage_rate);
        out += ',' + format_real(r.ci95_outage);
        out += ',' + format_real(r.mean_gamma_size);
        out += ',' + std::to_string(r.master_seed);
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<ResultRow>& rows)
{
    auto out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({
            {"scheme", r.scheme},
            {"n_relays", r.n_relays},
            {"zeta", round_to_emitted(r.zeta)},
            {"rho_db", detail::json_real(r.rho_db)},
            {"trials", r.trials},
            {"energy_total_j_per_bit", detail::json_real(r.energy_total_j_per_bit)},
            {"energy_ms_j_per_bit", detail::json_real(r.energy_ms_j_per_bit)},
            {"energy_relay_j_per_bit", detail::json_real(r.energy_relay_j_per_bit)},
            {"energy_bs_j_per_bit", detail::json_real(r.energy_bs_j_per_bit)},
            {"ci95_energy", detail::json_real(r.ci95_energy)},
            {"outage_rate", round_to_emitted(r.outage_rate)},
            {"ci95_outage", round_to_emitted(r.ci95_outage)},
            {"mean_gamma_size", round_to_emitted(r.mean_gamma_size)},
            {"master_seed", r.master_seed},
        });
    }
    return out;
}

inline std::string render_results(const std::vector<ResultRow>& rows, OutputFormat format)
{
    return format == OutputFormat::csv ? to_csv(rows) : to_json(rows).dump(2) + "\n";
}

/// Writes rows to path; throws std::runtime_error when the path is not writable.
inline void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write results to '" + path.string() + "'");
    }
    out << render_results(rows, format);
    if (!out.flush()) {
        throw std::runtime_error("failed writing results to '" + path.string() + "'");
    }
}

inline std::vector<ResultRow> parse_csv_results(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header) {
        throw std::runtime_error("results CSV: unexpected header");
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = detail::split_csv_line(line);
        if (f.size() != 14) {
            throw std::runtime_error("results CSV: expected 14 fields, got " + std::to_string(f.size()));
        }
        ResultRow r;
        r.scheme = f[0];
        r.n_relays = std::stoull(f[1]);
        r.zeta = std::stod(f[2]);
        r.rho_db = detail::parse_optional(f[3]);
        r.trials = std::stoull(f[4]);
        r.energy_total_j_per_bit = detail::parse_optional(f[5]);
        r.energy_ms_j_per_bit = detail::parse_optional(f[6]);
        r.energy_relay_j_per_bit = detail::parse_optional(f[7]);
        r.energy_bs_j_per_bit = detail::parse_optional(f[8]);
        r.ci95_energy = detail::parse_optional(f[9]);
        r.outage_rate = std::stod(f[10]);
        r.ci95_outage = std::stod(f[11]);
        r.mean_gamma_size = std::stod(f[12]);
        r.master_seed = std::stoull(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ResultRow> parse_json_results(const std::string& text)
{
    const auto doc = nlohmann::json::parse(text);
    std::vector<ResultRow> rows;
    for (const auto& j : doc) {
        ResultRow r;
        r.scheme = j.at("scheme").get<std::string>();
        r.n_relays = j.at("n_relays").get<std::size_t>();
        r.zeta = j.at("zeta").get<double>();
        r.rho_db = detail::json_optional(j.at("rho_db"));
        r.trials = j.at("trials").get<std::uint64_t>();
        r.energy_total_j_per_bit = detail::json_optional(j.at("energy_total_j_per_bit"));
        r.energy_ms_j_per_bit = detail::json_optional(j.at("energy_ms_j_per_bit"));
        r.energy_relay_j_per_bit = detail::json_optional(j.at("energy_relay_j_per_bit"));
        r.energy_bs_j_per_bit = detail::json_optional(j.at("energy_bs_j_per_bit"));
        r.ci95_energy = detail::json_optional(j.at("ci95_energy"));
        r.outage_rate = j.at("outage_rate").get<double>();
        r.ci95_outage = j.at("ci95_outage").get<double>();
        r.mean_gamma_size = j.at("mean_gamma_size").get<double>();
        r.master_seed = j.at("master_seed").get<std::uint64_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace relaysim
