#pragma once

// Multi-round driver, cumulative metrics and multi-seed replication.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "wsnsim/protocols/leach.hpp"
#include "wsnsim/protocols/mod_leach.hpp"
#include "wsnsim/protocols/tcca.hpp"

namespace wsnsim {

struct ScenarioConfig {
    Protocol protocol = Protocol::Leach;
    std::int64_t nodes = 100;
    std::int64_t rounds = 1000;
    std::uint64_t seed = 1;
    double initial_energy_nj = 5e8;  // 0.5 J
    std::optional<double> field_side;  // default keeps 100 nodes per hectare
    std::optional<Point> bs_pos;       // default: field centre
    double radio_range = 30.0;
    ElectionParams election;
    RadioParams radio;
    SizeTable sizes;
    KeyingParams keying;
    TccaParams tcca;
    bool mod_second_term_confirms = true;

    double effective_field_side() const { return field_side.value_or(default_field_side(nodes)); }
    Point effective_bs_pos() const {
        const double s = effective_field_side();
        return bs_pos.value_or(Point{s / 2.0, s / 2.0});
    }

    void validate() const {
        if (nodes < 0) throw ConfigError("nodes", "must be >= 0");
        if (rounds <= 0) throw ConfigError("rounds", "must be > 0");
        if (!std::isfinite(initial_energy_nj) || initial_energy_nj < 0.0)
            throw ConfigError("initial_energy_nj", "must be finite and >= 0");
        if (field_side && (!std::isfinite(*field_side) || *field_side <= 0.0))
            throw ConfigError("field_side", "must be finite and > 0");
        if (bs_pos && (!std::isfinite(bs_pos->x) || !std::isfinite(bs_pos->y)))
            throw ConfigError("bs_x", "base station position must be finite");
        if (!std::isfinite(radio_range) || radio_range < 0.0) throw ConfigError("radio_range", "must be finite and >= 0");
        election.validate();
        if (!std::isfinite(radio.e_elec_nj_per_bit) || radio.e_elec_nj_per_bit < 0.0)
            throw ConfigError("e_elec_nj_per_bit", "must be finite and >= 0");
        if (!std::isfinite(radio.e_amp_pj_per_bit_m2) || radio.e_amp_pj_per_bit_m2 < 0.0)
            throw ConfigError("e_amp_pj_per_bit_m2", "must be finite and >= 0");
        if (sizes.mac_bits > 64) throw ConfigError("mac_bits", "must be <= 64");
        keying.validate();
        if (tcca.initial_ttl < 1) throw ConfigError("tcca_initial_ttl", "must be >= 1");
    }

    ProtocolParams protocol_params() const {
        ProtocolParams p;
        p.election = election;
        p.radio = radio;
        p.sizes = sizes;
        p.keying = keying;
        p.tcca = tcca;
        p.mod_second_term_confirms = mod_second_term_confirms;
        return p;
    }

    /// Master seed of the key pool, independent of the simulation stream.
    std::uint64_t key_seed() const { return mix64(seed, 0x6b657973ULL); }
};

inline Network deploy(const ScenarioConfig& cfg) {
    return deploy(cfg.nodes, cfg.effective_field_side(), cfg.effective_bs_pos(), cfg.seed,
                  DeploymentParams{cfg.initial_energy_nj, cfg.radio_range});
}

inline std::unique_ptr<RoundEngine> make_engine(Protocol protocol, const ProtocolParams& params, std::uint64_t key_seed,
                                                std::size_t nodes) {
    switch (protocol) {
        case Protocol::Leach: return std::make_unique<LeachEngine>(params);
        case Protocol::SecLeach: return std::make_unique<LeachEngine>(params, KeyMaterial(key_seed, params.keying, nodes));
        case Protocol::Tcca: return std::make_unique<TccaEngine>(params);
        case Protocol::ModLeach: return std::make_unique<ModLeachEngine>(params);
        case Protocol::ModSecLeach:
            return std::make_unique<ModLeachEngine>(params, KeyMaterial(key_seed, params.keying, nodes));
    }
    throw ConfigError("protocol", "unknown protocol");
}

struct MetricsRow {
    RoundReport report;
    std::uint32_t alive = 0;
    std::uint32_t dead_cum = 0;
    double energy_cum_nj = 0.0;
    std::uint64_t bits_cum = 0;
    std::uint64_t overload_round = 0;
    std::uint64_t overload_cum = 0;
};

struct MetricsSeries {
    Protocol protocol = Protocol::Leach;
    std::uint64_t seed = 0;
    std::size_t nodes = 0;
    std::vector<MetricsRow> rows;
    std::optional<std::uint64_t> first_death_round;
    // Set when the run stopped early because every node was dead.
    std::optional<std::uint64_t> all_dead_round;

    double total_energy_nj() const { return rows.empty() ? 0.0 : rows.back().energy_cum_nj; }
    std::uint64_t total_bits() const { return rows.empty() ? 0 : rows.back().bits_cum; }
    std::uint64_t overload_bits() const { return rows.empty() ? 0 : rows.back().overload_cum; }
    std::uint32_t dead_nodes() const { return rows.empty() ? 0 : rows.back().dead_cum; }

    friend bool operator==(const MetricsSeries& a, const MetricsSeries& b) {
        if (a.protocol != b.protocol || a.seed != b.seed || a.nodes != b.nodes || a.rows.size() != b.rows.size())
            return false;
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            const MetricsRow& x = a.rows[i];
            const MetricsRow& y = b.rows[i];
            if (x.alive != y.alive || x.dead_cum != y.dead_cum || x.energy_cum_nj != y.energy_cum_nj ||
                x.bits_cum != y.bits_cum || x.overload_cum != y.overload_cum ||
                x.report.transmissions != y.report.transmissions || x.report.receptions != y.report.receptions ||
                x.report.ch_count != y.report.ch_count || x.report.orphan_count != y.report.orphan_count ||
                x.report.bs_packets != y.report.bs_packets)
                return false;
        }
        return a.first_death_round == b.first_death_round && a.all_dead_round == b.all_dead_round;
    }
};

/// Called after every round with the network state at the round boundary.
using RoundObserver = std::function<void(const Network&, const MetricsRow&)>;

inline MetricsSeries run_simulation(const ScenarioConfig& cfg, const RoundObserver& observer = {},
                                    const ReplayProbe& probe = {}) {
    cfg.validate();
    Network net = deploy(cfg);
    ProtocolParams params = cfg.protocol_params();
    params.replay = probe;
    std::unique_ptr<RoundEngine> engine = make_engine(cfg.protocol, params, cfg.key_seed(), net.size());

    MetricsSeries series;
    series.protocol = cfg.protocol;
    series.seed = cfg.seed;
    series.nodes = net.size();
    series.rows.reserve(static_cast<std::size_t>(cfg.rounds));

    MetricsRow acc;
    for (std::int64_t r = 0; r < cfg.rounds; ++r) {
        if (net.alive_count() == 0 && net.size() > 0) {
            series.all_dead_round = net.round_index();
            break;
        }
        MetricsRow row;
        row.report = engine->run_round(net);
        row.alive = row.report.alive_at_end;
        row.dead_cum = static_cast<std::uint32_t>(net.size()) - row.alive;
        row.energy_cum_nj = acc.energy_cum_nj + row.report.energy_nj;
        row.bits_cum = acc.bits_cum + row.report.bits_total();
        row.overload_round = overload_bits(row.report, cfg.sizes);
        row.overload_cum = acc.overload_cum + row.overload_round;
        if (row.dead_cum > 0 && !series.first_death_round) series.first_death_round = row.report.round;
        acc = row;
        series.rows.push_back(row);
        if (observer) observer(net, row);
    }
    return series;
}

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for one sample
    std::size_t count = 0;

    double std_error() const { return count > 0 ? stddev / std::sqrt(static_cast<double>(count)) : 0.0; }
};

inline Stat summarize(std::span<const double> xs) {
    Stat s;
    s.count = xs.size();
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

struct ReplicationSummary {
    Stat energy_nj;
    Stat overload_bits;
    Stat dead_nodes;
    Stat total_bits;
};

struct Replication {
    std::vector<MetricsSeries> runs;  // ascending seed
    ReplicationSummary summary;
};

inline ReplicationSummary summarize_runs(std::span<const MetricsSeries> runs) {
    std::vector<double> e, o, d, b;
    for (const MetricsSeries& s : runs) {
        e.push_back(s.total_energy_nj());
        o.push_back(static_cast<double>(s.overload_bits()));
        d.push_back(static_cast<double>(s.dead_nodes()));
        b.push_back(static_cast<double>(s.total_bits()));
    }
    return {summarize(e), summarize(o), summarize(d), summarize(b)};
}

/// Independent runs of `cfg` for each seed. Results are ordered by seed so
/// the summary does not depend on the order seeds were given in.
inline Replication replicate(ScenarioConfig cfg, std::vector<std::uint64_t> seeds) {
    std::sort(seeds.begin(), seeds.end());
    Replication rep;
    for (std::uint64_t seed : seeds) {
        cfg.seed = seed;
        rep.runs.push_back(run_simulation(cfg));
    }
    rep.summary = summarize_runs(rep.runs);
    return rep;
}

}  // namespace wsnsim
