#pragma once

// Flat key/value scenario files and CSV output.
//
// Scenario file: one `key = value` per line; blank lines and text after '#'
// are ignored. Keys match ScenarioConfig field names (see kConfigKeys).

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wsnsim/engine.hpp"

namespace wsnsim {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(std::string(key), "must be finite");
    }
    return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(text) + "'");
}

/// Shortest round-trip decimal form; locale independent.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline constexpr std::string_view kConfigKeys[] = {
    "protocol",          "nodes",          "rounds",           "seed",
    "initial_energy_nj", "initial_energy_j", "field_side",     "bs_x",
    "bs_y",              "radio_range",    "p",                "t_min",
    "e_elec_nj_per_bit", "e_amp_pj_per_bit_m2", "control_bits", "data_bits",
    "key_id_bits",       "nonce_bits",     "counter_bits",     "mac_bits",
    "flag_bits",         "ttl_bits",       "timestamp_bits",   "slot_entry_bits",
    "pool_size",         "ring_size",      "tcca_initial_ttl", "tcca_energy_scaled_ttl",
    "tcca_ttl_max",      "mod_second_term_confirms",
};

/// Applies one setting. Throws ConfigError naming the key on any problem.
inline void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_bool;
    using detail::parse_number;
    auto u32 = [&] { return parse_number<std::uint32_t>(key, value); };
    auto f64 = [&] { return parse_number<double>(key, value); };

    if (key == "protocol") {
        const auto p = parse_protocol(value);
        if (!p) throw ConfigError("protocol", "unknown protocol '" + std::string(value) + "'");
        cfg.protocol = *p;
    } else if (key == "nodes") cfg.nodes = parse_number<std::int64_t>(key, value);
    else if (key == "rounds") cfg.rounds = parse_number<std::int64_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "initial_energy_nj") cfg.initial_energy_nj = f64();
    else if (key == "initial_energy_j") cfg.initial_energy_nj = f64() * 1e9;
    else if (key == "field_side") cfg.field_side = f64();
    else if (key == "bs_x") {
        Point bs = cfg.effective_bs_pos();
        bs.x = f64();
        cfg.bs_pos = bs;
    } else if (key == "bs_y") {
        Point bs = cfg.effective_bs_pos();
        bs.y = f64();
        cfg.bs_pos = bs;
    } else if (key == "radio_range") cfg.radio_range = f64();
    else if (key == "p") cfg.election.p = f64();
    else if (key == "t_min") cfg.election.t_min = f64();
    else if (key == "e_elec_nj_per_bit") cfg.radio.e_elec_nj_per_bit = f64();
    else if (key == "e_amp_pj_per_bit_m2") cfg.radio.e_amp_pj_per_bit_m2 = f64();
    else if (key == "control_bits") cfg.sizes.control_bits = u32();
    else if (key == "data_bits") cfg.sizes.data_bits = u32();
    else if (key == "key_id_bits") cfg.sizes.key_id_bits = u32();
    else if (key == "nonce_bits") cfg.sizes.nonce_bits = u32();
    else if (key == "counter_bits") cfg.sizes.counter_bits = u32();
    else if (key == "mac_bits") cfg.sizes.mac_bits = u32();
    else if (key == "flag_bits") cfg.sizes.flag_bits = u32();
    else if (key == "ttl_bits") cfg.sizes.ttl_bits = u32();
    else if (key == "timestamp_bits") cfg.sizes.timestamp_bits = u32();
    else if (key == "slot_entry_bits") cfg.sizes.slot_entry_bits = u32();
    else if (key == "pool_size") cfg.keying.pool_size = u32();
    else if (key == "ring_size") cfg.keying.ring_size = u32();
    else if (key == "tcca_initial_ttl") cfg.tcca.initial_ttl = u32();
    else if (key == "tcca_energy_scaled_ttl") cfg.tcca.energy_scaled_ttl = parse_bool(key, value);
    else if (key == "tcca_ttl_max") cfg.tcca.ttl_max = u32();
    else if (key == "mod_second_term_confirms") cfg.mod_second_term_confirms = parse_bool(key, value);
    else throw ConfigError(std::string(key), "unknown configuration key");
}

inline void apply_config(ScenarioConfig& cfg, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        apply_setting(cfg, detail::trim(view.substr(0, eq)), detail::trim(view.substr(eq + 1)));
    }
}

inline void apply_config_file(ScenarioConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    apply_config(cfg, in);
}

/// Effective configuration in the same key/value format.
inline std::string to_config_text(const ScenarioConfig& cfg) {
    using detail::format_double;
    std::ostringstream out;
    const Point bs = cfg.effective_bs_pos();
    out << "protocol = " << to_string(cfg.protocol) << '\n'
        << "nodes = " << cfg.nodes << '\n'
        << "rounds = " << cfg.rounds << '\n'
        << "seed = " << cfg.seed << '\n'
        << "initial_energy_nj = " << format_double(cfg.initial_energy_nj) << '\n'
        << "field_side = " << format_double(cfg.effective_field_side()) << '\n'
        << "bs_x = " << format_double(bs.x) << '\n'
        << "bs_y = " << format_double(bs.y) << '\n'
        << "radio_range = " << format_double(cfg.radio_range) << '\n'
        << "p = " << format_double(cfg.election.p) << '\n'
        << "t_min = " << format_double(cfg.election.t_min) << '\n'
        << "e_elec_nj_per_bit = " << format_double(cfg.radio.e_elec_nj_per_bit) << '\n'
        << "e_amp_pj_per_bit_m2 = " << format_double(cfg.radio.e_amp_pj_per_bit_m2) << '\n'
        << "control_bits = " << cfg.sizes.control_bits << '\n'
        << "data_bits = " << cfg.sizes.data_bits << '\n'
        << "key_id_bits = " << cfg.sizes.key_id_bits << '\n'
        << "nonce_bits = " << cfg.sizes.nonce_bits << '\n'
        << "counter_bits = " << cfg.sizes.counter_bits << '\n'
        << "mac_bits = " << cfg.sizes.mac_bits << '\n'
        << "flag_bits = " << cfg.sizes.flag_bits << '\n'
        << "ttl_bits = " << cfg.sizes.ttl_bits << '\n'
        << "timestamp_bits = " << cfg.sizes.timestamp_bits << '\n'
        << "slot_entry_bits = " << cfg.sizes.slot_entry_bits << '\n'
        << "pool_size = " << cfg.keying.pool_size << '\n'
        << "ring_size = " << cfg.keying.ring_size << '\n'
        << "tcca_initial_ttl = " << cfg.tcca.initial_ttl << '\n'
        << "tcca_energy_scaled_ttl = " << (cfg.tcca.energy_scaled_ttl ? "true" : "false") << '\n'
        << "tcca_ttl_max = " << cfg.tcca.ttl_max << '\n'
        << "mod_second_term_confirms = " << (cfg.mod_second_term_confirms ? "true" : "false") << '\n';
    return out.str();
}

inline constexpr std::string_view kCsvHeader =
    "round,protocol,seed,alive,dead_cum,ch_count,orphan_count,energy_round_nj,energy_cum_nj,"
    "bits_round,bits_cum,overload_round,overload_cum,bs_reports";

/// Fixed three-decimal rendering for energies.
inline std::string format_energy(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    return std::string(buf, ptr);
}

inline void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

inline void write_csv_rows(std::ostream& out, const MetricsSeries& s) {
    const std::string_view name = to_string(s.protocol);
    for (const MetricsRow& row : s.rows) {
        out << row.report.round << ',' << name << ',' << s.seed << ',' << row.alive << ',' << row.dead_cum << ','
            << row.report.ch_count << ',' << row.report.orphan_count << ',' << format_energy(row.report.energy_nj)
            << ',' << format_energy(row.energy_cum_nj) << ',' << row.report.bits_total() << ',' << row.bits_cum << ','
            << row.overload_round << ',' << row.overload_cum << ',' << row.report.bs_packets << '\n';
    }
}

}  // namespace wsnsim
