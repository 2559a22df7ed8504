#pragma once

// Protocol x size x seed sweeps. Every (protocol, size, seed) cell is an
// independent run; cells may execute on worker threads but results are
// stored by index, so output never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <ostream>
#include <thread>
#include <vector>

#include "wsnsim/engine.hpp"
#include "wsnsim/io.hpp"

namespace wsnsim {

struct ComparisonCell {
    Protocol protocol = Protocol::Leach;
    std::int64_t nodes = 0;
    std::vector<MetricsSeries> runs;  // ascending seed
    ReplicationSummary summary;
};

struct Comparison {
    std::vector<Protocol> protocols;
    std::vector<std::int64_t> sizes;
    std::vector<std::uint64_t> seeds;
    // sizes-major, then protocols in the order given
    std::vector<ComparisonCell> cells;

    const ComparisonCell& cell(Protocol p, std::int64_t nodes) const {
        for (const ComparisonCell& c : cells)
            if (c.protocol == p && c.nodes == nodes) return c;
        throw std::out_of_range("comparison: no such cell");
    }
};

/// Runs every protocol over every size and seed. Runs with equal (size,
/// seed) share one deployment because placement depends only on those.
inline Comparison run_comparison(const ScenarioConfig& base, std::vector<Protocol> protocols,
                                 std::vector<std::int64_t> sizes, std::vector<std::uint64_t> seeds,
                                 unsigned workers = 1) {
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    Comparison cmp{protocols, sizes, seeds, {}};
    for (std::int64_t n : sizes)
        for (Protocol p : protocols) {
            ComparisonCell cell;
            cell.protocol = p;
            cell.nodes = n;
            cell.runs.resize(seeds.size());
            cmp.cells.push_back(std::move(cell));
        }

    const std::size_t jobs = cmp.cells.size() * seeds.size();
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            ComparisonCell& cell = cmp.cells[job / seeds.size()];
            ScenarioConfig cfg = base;
            cfg.protocol = cell.protocol;
            cfg.nodes = cell.nodes;
            cfg.seed = seeds[job % seeds.size()];
            cell.runs[job % seeds.size()] = run_simulation(cfg);
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1 || jobs <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < std::min<std::size_t>(workers, jobs); ++i) pool.emplace_back(work);
    }
    for (ComparisonCell& cell : cmp.cells) cell.summary = summarize_runs(cell.runs);
    return cmp;
}

inline constexpr std::string_view kSummaryHeader =
    "protocol,nodes,seeds,energy_cum_mean_nj,energy_cum_sd_nj,overload_cum_mean,overload_cum_sd,dead_mean,dead_sd";

inline void write_summary_csv(std::ostream& out, const Comparison& cmp) {
    using detail::format_double;
    out << kSummaryHeader << '\n';
    for (const ComparisonCell& c : cmp.cells) {
        const ReplicationSummary& s = c.summary;
        out << to_string(c.protocol) << ',' << c.nodes << ',' << c.runs.size() << ',' << format_double(s.energy_nj.mean)
            << ',' << format_double(s.energy_nj.stddev) << ',' << format_double(s.overload_bits.mean) << ','
            << format_double(s.overload_bits.stddev) << ',' << format_double(s.dead_nodes.mean) << ','
            << format_double(s.dead_nodes.stddev) << '\n';
    }
}

/// Long-form CSV of every run of one size, sorted by (protocol name, seed,
/// round).
inline void write_comparison_csv(std::ostream& out, const Comparison& cmp, std::int64_t nodes) {
    std::vector<const ComparisonCell*> cells;
    for (const ComparisonCell& c : cmp.cells)
        if (c.nodes == nodes) cells.push_back(&c);
    std::sort(cells.begin(), cells.end(),
              [](const ComparisonCell* a, const ComparisonCell* b) { return to_string(a->protocol) < to_string(b->protocol); });
    write_csv_header(out);
    for (const ComparisonCell* c : cells)
        for (const MetricsSeries& s : c->runs) write_csv_rows(out, s);
}

enum class Figure { Energy, Overload, Dead };

/// size x protocol matrix of final cumulative means.
inline void write_figure_csv(std::ostream& out, const Comparison& cmp, Figure fig) {
    using detail::format_double;
    out << "nodes";
    for (Protocol p : cmp.protocols) out << ',' << to_string(p);
    out << '\n';
    for (std::int64_t n : cmp.sizes) {
        out << n;
        for (Protocol p : cmp.protocols) {
            const ReplicationSummary& s = cmp.cell(p, n).summary;
            const double v = fig == Figure::Energy ? s.energy_nj.mean
                             : fig == Figure::Overload ? s.overload_bits.mean
                                                       : s.dead_nodes.mean;
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

}  // namespace wsnsim
