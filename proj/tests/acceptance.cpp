// Acceptance checks A1-A10. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracle.hpp"
#include "traces.hpp"
#include "wsnsim/compare.hpp"
#include "wsnsim/io.hpp"

using namespace wsnsim;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail.clear();
        if (!detail.empty()) detail += "; ";
        detail += what;
        pass = false;
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// A1 ---------------------------------------------------------------------

Verdict a1_threshold_oracle() {
    Verdict v;
    Rng rng(20240611);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const long round = static_cast<long>(uniform_index(rng, 5000));
        const double p = 0.01 + 0.49 * uniform01(rng);
        const double max_e = 1.0 + 1e9 * uniform01(rng);
        const double re = max_e * uniform01(rng);
        const double t_min = 0.2 * uniform01(rng);
        const bool in_g = uniform01(rng) < 0.8;
        const double got[] = {leach_threshold(in_g, round, p), tcca_threshold(in_g, round, p, re, max_e, t_min),
                              mod_two_round_threshold(in_g, round, p, re, max_e, t_min),
                              mod_one_round_threshold(in_g, round, p, re, max_e, t_min)};
        const double want[] = {oracle::leach(in_g, round, p), oracle::tcca(in_g, round, p, re, max_e, t_min),
                               oracle::mod_two(in_g, round, p, re, max_e, t_min),
                               oracle::mod_one(in_g, round, p, re, max_e, t_min)};
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
        if (mod_two_round_threshold(in_g, round, p, re, max_e, 0.0) !=
            mod_one_round_threshold(in_g, round, p, re / 2.0, max_e, 0.0))
            v.require(false, "mod_two(re) != mod_one(re/2) at t_min=0");
    }
    v.require(worst <= 1e-12, fmt("max abs error %.3g", worst));
    if (v.pass) v.detail = fmt("1000 tuples, max abs error %.3g", worst);
    return v;
}

// A2 ---------------------------------------------------------------------

Verdict a2_exactly_once() {
    Verdict v;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ScenarioConfig cfg;
        cfg.nodes = 100;
        cfg.rounds = 20;
        cfg.seed = seed;
        cfg.initial_energy_nj = 1e15;  // 10^6 J
        std::vector<int> times(100, 0);
        const MetricsSeries s = run_simulation(cfg, [&](const Network& net, const MetricsRow&) {
            for (const Node& n : net.nodes())
                if (n.role == Role::ClusterHead) ++times[n.id];
        });
        v.require(s.dead_nodes() == 0, "deaths in seed " + std::to_string(seed));
        for (int t : times)
            if (t != 1) {
                v.require(false, "seed " + std::to_string(seed) + ": a node was CH " + std::to_string(t) + " times");
                break;
            }
    }
    if (v.pass) v.detail = "10 seeds x 100 nodes, each CH exactly once in 20 rounds";
    return v;
}

// A3 ---------------------------------------------------------------------

Verdict a3_conservation_determinism() {
    Verdict v;
    double worst = 0;
    for (Protocol p : kAllProtocols) {
        ScenarioConfig cfg;
        cfg.protocol = p;
        cfg.nodes = 200;
        cfg.rounds = 100;
        cfg.seed = 5;
        auto observe = [&](const Network& net, const MetricsRow& row) {
            const double drained = net.initial_total() - net.residual_total();
            const double rel = std::abs(row.energy_cum_nj - drained) / std::max(1.0, drained);
            worst = std::max(worst, rel);
            const double ledger = std::abs(net.consumed_total() - drained) / std::max(1.0, drained);
            worst = std::max(worst, ledger);
        };
        const MetricsSeries a = run_simulation(cfg, observe);
        const MetricsSeries b = run_simulation(cfg);
        std::ostringstream ca, cb;
        write_csv_header(ca);
        write_csv_rows(ca, a);
        write_csv_header(cb);
        write_csv_rows(cb, b);
        v.require(ca.str() == cb.str(), std::string(to_string(p)) + " CSV differs between runs");
    }
    v.require(worst <= 1e-9, fmt("conservation error %.3g", worst));
    if (v.pass) v.detail = fmt("5 protocols, max relative drift %.3g, CSV byte-identical", worst);
    return v;
}

// A4 / A5 / A6 / A7 ------------------------------------------------------

const std::vector<Protocol> kFigureOrder = {Protocol::ModLeach, Protocol::ModSecLeach, Protocol::Tcca, Protocol::Leach,
                                            Protocol::SecLeach};

using Metric = std::function<Stat(const ReplicationSummary&)>;

// Strict ascending order with every adjacent gap above 2 pooled SEs.
Verdict strict_order(const Comparison& cmp, std::int64_t n, const Metric& metric, const char* unit) {
    Verdict v;
    std::string values;
    for (std::size_t i = 0; i < kFigureOrder.size(); ++i) {
        const Stat s = metric(cmp.cell(kFigureOrder[i], n).summary);
        values += std::string(i ? " < " : "") + std::string(to_string(kFigureOrder[i])) + fmt(" %.4g", s.mean);
        if (i == 0) continue;
        const Stat prev = metric(cmp.cell(kFigureOrder[i - 1], n).summary);
        const double gap = s.mean - prev.mean;
        const double se = std::sqrt(prev.std_error() * prev.std_error() + s.std_error() * s.std_error());
        if (!(gap > 2 * se))
            v.require(false, std::string(to_string(kFigureOrder[i - 1])) + " vs " +
                                 std::string(to_string(kFigureOrder[i])) + fmt(": gap %.4g, 2SE %.4g", gap, 2 * se));
    }
    v.detail = (v.pass ? std::string() : v.detail + " | ") + values + " " + unit;
    return v;
}

Verdict a6_dead_order(const Comparison& cmp, std::int64_t n) {
    Verdict v;
    std::string values;
    for (std::size_t i = 0; i < kFigureOrder.size(); ++i) {
        const Stat s = cmp.cell(kFigureOrder[i], n).summary.dead_nodes;
        values += std::string(i ? " <= " : "") + std::string(to_string(kFigureOrder[i])) + fmt(" %.1f", s.mean);
        if (i == 0) continue;
        const Stat prev = cmp.cell(kFigureOrder[i - 1], n).summary.dead_nodes;
        const double se = std::sqrt(prev.std_error() * prev.std_error() + s.std_error() * s.std_error());
        // Ordered, or a tie within one standard error.
        if (!(prev.mean < s.mean || std::abs(s.mean - prev.mean) <= se))
            v.require(false, std::string(to_string(kFigureOrder[i - 1])) + " > " +
                                 std::string(to_string(kFigureOrder[i])));
    }
    v.detail = (v.pass ? std::string() : v.detail + " | ") + values;
    return v;
}

Verdict a7_security_overhead(const Comparison& cmp, std::int64_t n) {
    Verdict v;
    const ComparisonCell& leach = cmp.cell(Protocol::Leach, n);
    const ComparisonCell& sec = cmp.cell(Protocol::SecLeach, n);
    const ComparisonCell& mod = cmp.cell(Protocol::ModLeach, n);
    const ComparisonCell& modsec = cmp.cell(Protocol::ModSecLeach, n);
    for (std::size_t i = 0; i < leach.runs.size(); ++i) {
        const std::string seed = std::to_string(leach.runs[i].seed);
        v.require(sec.runs[i].total_energy_nj() > leach.runs[i].total_energy_nj(), "seed " + seed + ": sec <= leach");
        v.require(modsec.runs[i].total_energy_nj() > mod.runs[i].total_energy_nj(),
                  "seed " + seed + ": mod-sec <= mod");
    }

    // Zero-width security fields with universal rings reproduce LEACH.
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ScenarioConfig cfg;
        cfg.nodes = 200;
        cfg.rounds = 200;
        cfg.seed = seed;
        cfg.initial_energy_nj = 2e7;  // some deaths, so the comparison covers them
        cfg.sizes.key_id_bits = cfg.sizes.nonce_bits = cfg.sizes.counter_bits = cfg.sizes.mac_bits = 0;
        cfg.keying = {1000, 1000};
        const MetricsSeries plain = run_simulation(cfg);
        cfg.protocol = Protocol::SecLeach;
        MetricsSeries secured = run_simulation(cfg);
        secured.protocol = Protocol::Leach;  // compare everything but the label
        v.require(plain == secured, "seed " + std::to_string(seed) + ": zeroed Sec-LEACH differs from LEACH");
    }
    if (v.pass)
        v.detail = std::to_string(leach.runs.size()) + " paired seeds at n=" + std::to_string(n) +
                   "; zeroed-field Sec-LEACH equals LEACH on 3 seeds";
    return v;
}

// A8 ---------------------------------------------------------------------

Verdict a8_keying_statistics() {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    auto choose = [](unsigned n, unsigned k) {
        cpp_int num = 1, den = 1;
        for (unsigned i = 0; i < k; ++i) {
            num *= n - i;
            den *= i + 1;
        }
        return cpp_int(num / den);
    };
    const cpp_rational none(choose(950, 50), choose(1000, 50));
    const double p_share = 1.0 - static_cast<double>(none);

    const std::uint64_t master = mix64(777, 0x6b657973ULL);
    const int pairs = 10000;
    int shared = 0;
    for (int i = 0; i < pairs; ++i) {
        const auto a = assign_ring(master, static_cast<NodeId>(2 * i), 50, 1000);
        const auto b = assign_ring(master, static_cast<NodeId>(2 * i + 1), 50, 1000);
        if (shared_key(a, b)) ++shared;
    }
    const double rate = static_cast<double>(shared) / pairs;
    const double sigma = std::sqrt(p_share * (1 - p_share) / pairs);
    Verdict v;
    v.require(std::abs(rate - p_share) <= 3 * sigma, "outside 3 sigma");
    v.detail = (v.pass ? std::string() : v.detail + " | ") +
               fmt("empirical %.5f, exact %.5f, sigma %.5f", rate, p_share, sigma);
    return v;
}

// A9 ---------------------------------------------------------------------

struct ProbeRun {
    std::vector<std::map<NodeId, std::vector<NodeId>>> membership;
    std::vector<std::uint32_t> delivered;
    std::uint64_t rejected = 0;
};

ProbeRun probe_run(Protocol p, const ReplayProbe& probe) {
    ScenarioConfig cfg;
    cfg.protocol = p;
    cfg.nodes = 300;
    cfg.seed = 21;
    cfg.initial_energy_nj = 1e15;
    Network net = deploy(cfg);
    ProtocolParams params = cfg.protocol_params();
    params.replay = probe;
    auto engine = make_engine(p, params, cfg.key_seed(), net.size());
    ProbeRun out;
    for (int r = 0; r < 30; ++r) {
        const RoundReport rep = engine->run_round(net);
        std::map<NodeId, std::vector<NodeId>> m;
        for (const auto& [ch, c] : engine->last_assignment().clusters)
            for (const ClusterMember& mem : c.members) m[ch].push_back(mem.id);
        out.membership.push_back(std::move(m));
        out.delivered.push_back(rep.readings_delivered);
        out.rejected += rep.replays_rejected;
    }
    return out;
}

Verdict a9_replay() {
    Verdict v;
    std::string counts;
    for (Protocol p : {Protocol::SecLeach, Protocol::ModSecLeach}) {
        const ProbeRun clean = probe_run(p, {});
        const ProbeRun joins = probe_run(p, {true, false});
        const ProbeRun reports = probe_run(p, {false, true});
        const std::string name(to_string(p));
        v.require(joins.rejected > 0 && reports.rejected > 0, name + ": no replays were injected");
        v.require(joins.membership == clean.membership && reports.membership == clean.membership,
                  name + ": membership changed");
        v.require(joins.delivered == clean.delivered && reports.delivered == clean.delivered,
                  name + ": BS-delivered counts changed");
        if (!counts.empty()) counts += "; ";
        counts += name + " rejected " + std::to_string(joins.rejected) + " joins/" + std::to_string(reports.rejected) +
                  " reports";
    }
    // Control: without security the injected duplicates do get through.
    const ProbeRun plain = probe_run(Protocol::Leach, {false, true});
    v.require(plain.delivered != probe_run(Protocol::Leach, {}).delivered, "probe had no effect on plain LEACH");
    v.detail = (v.pass ? std::string() : v.detail + " | ") + counts;
    return v;
}

// A10 --------------------------------------------------------------------

void check_trace(Verdict& v, const char* name, const traces::Outcome& o) {
    v.require(o.transmissions == o.expected_transmissions,
              std::string(name) + ": " + std::to_string(o.transmissions) + " transmissions, expected " +
                  std::to_string(o.expected_transmissions));
    for (std::size_t i = 0; i < o.spent.size(); ++i)
        if (std::abs(o.spent[i] - o.expected_spent[i]) > traces::kUlpSlack)
            v.require(false, std::string(name) + fmt(": node %g spent %.3f, expected %.3f", static_cast<double>(i),
                                                     o.spent[i], o.expected_spent[i]));
}

Verdict a10_hand_traces() {
    Verdict v;
    check_trace(v, "leach 3-node", traces::leach_three_node());
    check_trace(v, "mod full", traces::mod_full_round());
    for (int k = 1; k <= 4; ++k) check_trace(v, ("mod half k=" + std::to_string(k)).c_str(), traces::mod_half_round(k));
    const traces::Outcome t = traces::tcca_two_hop();
    check_trace(v, "tcca 2-hop", t);
    // C's report alone: delivered over B, priced per hop.
    const RadioParams r;
    const double path = tx_cost(r, 2050, 25) + rx_cost(r, 2050) + tx_cost(r, 2050, 25) + rx_cost(r, 2050);
    v.require(path == traces::tcca_chain_report_cost(), "tcca chain report cost");
    const Cluster* c = t.assignment.cluster_of_head(0);
    v.require(c && c->members.size() == 2 && c->members[1].relays == std::vector<NodeId>{1}, "tcca relay path");
    if (v.pass) v.detail = "LEACH 7 tx, Mod full 6 tx, Mod half 2k+1 tx (k=1..4), TCCA 11 tx; per-node energy within 1e-6 nJ";
    return v;
}

struct Criterion {
    const char* id;
    std::function<Verdict()> run;
};

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const std::int64_t n = 1000;
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    const std::vector<Protocol> all(kAllProtocols.begin(), kAllProtocols.end());

    std::optional<Comparison> main_runs;
    auto defaults = [&]() -> const Comparison& {
        if (!main_runs) main_runs = run_comparison(ScenarioConfig{}, all, {n}, seeds, workers());
        return *main_runs;
    };

    const std::vector<Criterion> criteria = {
        {"A1", a1_threshold_oracle},
        {"A2", a2_exactly_once},
        {"A3", a3_conservation_determinism},
        {"A4", [&] { return strict_order(defaults(), n, [](const ReplicationSummary& s) { return s.energy_nj; }, "nJ"); }},
        {"A5",
         [&] { return strict_order(defaults(), n, [](const ReplicationSummary& s) { return s.overload_bits; }, "bits"); }},
        {"A6",
         [&] {
             ScenarioConfig low;
             low.initial_energy_nj = 1e7;  // 0.01 J
             return a6_dead_order(run_comparison(low, all, {n}, seeds, workers()), n);
         }},
        {"A7", [&] { return a7_security_overhead(defaults(), n); }},
        {"A8", a8_keying_statistics},
        {"A9", a9_replay},
        {"A10", a10_hand_traces},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(clock::now() - start).count();
        std::printf("%-3s %s  (%.2fs)  %s\n", c.id, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
