// wsnsim: command-line front end.
//
//   wsnsim run      --protocol P --nodes N --rounds R --seed S [--config F] [--out FILE]
//   wsnsim compare  [--sizes 100,1000] [--seeds 1,2,3,4,5] [--big] [--out DIR]
//   wsnsim plotdata --out DIR [same options as compare]
//
// Settings resolve as built-in defaults < --config file < flags. The seed
// falls back to $WSNSIM_SEED, then 1.
//
// Exit codes: 0 success, 2 flag/config error, 1 internal failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wsnsim/compare.hpp"
#include "wsnsim/io.hpp"

namespace {

using namespace wsnsim;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> settings;  // --set key=value
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WSNSIM_SEED"); env && *env) {
        try {
            return detail::parse_number<std::uint64_t>("WSNSIM_SEED", env);
        } catch (const ConfigError&) {
            throw;
        }
    }
    return 1;
}

ScenarioConfig base_config(const CommonFlags& flags) {
    ScenarioConfig cfg;
    cfg.seed = default_seed();
    if (!flags.config_path.empty()) apply_config_file(cfg, flags.config_path);
    for (const std::string& kv : flags.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("set", "expected key=value, got '" + kv + "'");
        apply_setting(cfg, detail::trim(std::string_view(kv).substr(0, eq)),
                      detail::trim(std::string_view(kv).substr(eq + 1)));
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Scenario file (key = value lines)");
    cmd->add_option("--set", flags.settings, "Override one setting, key=value (repeatable)");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

struct SweepFlags {
    std::vector<std::int64_t> sizes{100, 1000};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<std::string> protocols;
    std::int64_t rounds = 1000;
    bool big = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string out;
};

void add_sweep(CLI::App* cmd, SweepFlags& f) {
    cmd->add_option("--sizes", f.sizes, "Network sizes")->delimiter(',');
    cmd->add_option("--seeds", f.seeds, "Seeds")->delimiter(',');
    cmd->add_option("--protocols", f.protocols, "Protocols (default: all five)")->delimiter(',');
    cmd->add_option("--rounds", f.rounds, "Rounds per run");
    cmd->add_flag("--big", f.big, "Also run 10000 nodes");
    cmd->add_option("--jobs", f.jobs, "Worker threads");
}

Comparison sweep(const CommonFlags& common, const SweepFlags& f, const CLI::App* cmd) {
    ScenarioConfig cfg = base_config(common);
    if (cmd->count("--rounds") || common.config_path.empty()) cfg.rounds = f.rounds;
    std::vector<Protocol> protocols;
    if (f.protocols.empty()) protocols.assign(kAllProtocols.begin(), kAllProtocols.end());
    for (const std::string& name : f.protocols) {
        const auto p = parse_protocol(name);
        if (!p) throw ConfigError("--protocols", "unknown protocol '" + name + "'");
        protocols.push_back(*p);
    }
    std::vector<std::int64_t> sizes = f.sizes;
    if (f.big && std::find(sizes.begin(), sizes.end(), 10000) == sizes.end()) sizes.push_back(10000);
    for (std::int64_t n : sizes) {
        ScenarioConfig probe = cfg;
        probe.nodes = n;
        probe.validate();
    }
    if (f.seeds.empty()) throw ConfigError("--seeds", "at least one seed is required");
    return run_comparison(cfg, protocols, sizes, f.seeds, f.jobs);
}

void print_summary(std::ostream& out, const Comparison& cmp) {
    out << "protocol        nodes   energy_cum_nj (mean +- sd)      overload_cum_bits (mean)   dead (mean)\n";
    for (const ComparisonCell& c : cmp.cells) {
        char line[256];
        std::snprintf(line, sizeof line, "%-15s %6lld   %.6e +- %.3e      %.6e              %.1f\n",
                      std::string(to_string(c.protocol)).c_str(), static_cast<long long>(c.nodes),
                      c.summary.energy_nj.mean, c.summary.energy_nj.stddev, c.summary.overload_bits.mean,
                      c.summary.dead_nodes.mean);
        out << line;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Round-based simulator of clustered sensor-network routing protocols"};
    app.require_subcommand(1);

    CommonFlags run_common;
    std::string protocol_name;
    std::int64_t nodes = 100;
    std::int64_t rounds = 1000;
    std::uint64_t seed = 0;
    std::string run_out;
    CLI::App* run = app.add_subcommand("run", "Run one simulation and write its per-round CSV");
    add_common(run, run_common);
    run->add_option("--protocol", protocol_name, "leach | tcca | sec-leach | mod-leach | mod-sec-leach");
    run->add_option("--nodes", nodes, "Node count");
    run->add_option("--rounds", rounds, "Rounds");
    run->add_option("--seed", seed, "Root seed");
    run->add_option("--out", run_out, "CSV path (default stdout)");

    CommonFlags cmp_common;
    SweepFlags cmp_flags;
    CLI::App* compare = app.add_subcommand("compare", "Run all protocols over sizes and seeds");
    add_common(compare, cmp_common);
    add_sweep(compare, cmp_flags);
    compare->add_option("--out", cmp_flags.out, "Output directory for per-size CSVs and summary.csv");

    CommonFlags plot_common;
    SweepFlags plot_flags;
    CLI::App* plotdata = app.add_subcommand("plotdata", "Write energy.csv, overload.csv and dead.csv");
    add_common(plotdata, plot_common);
    add_sweep(plotdata, plot_flags);
    plotdata->add_option("--out", plot_flags.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            ScenarioConfig cfg = base_config(run_common);
            if (run->count("--protocol")) {
                const auto p = parse_protocol(protocol_name);
                if (!p) throw ConfigError("--protocol", "unknown protocol '" + protocol_name + "'");
                cfg.protocol = *p;
            }
            if (run->count("--nodes")) cfg.nodes = nodes;
            if (run->count("--rounds")) cfg.rounds = rounds;
            if (run->count("--seed")) cfg.seed = seed;
            cfg.validate();
            if (is_secure(cfg.protocol))
                std::cerr << "implied no-shared-key probability per node pair: "
                          << no_shared_key_probability(cfg.keying.pool_size, cfg.keying.ring_size) << '\n';
            const MetricsSeries series = run_simulation(cfg);
            if (run_out.empty()) {
                write_csv_header(std::cout);
                write_csv_rows(std::cout, series);
            } else {
                std::ofstream out(run_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + run_out);
                write_csv_header(out);
                write_csv_rows(out, series);
                write_text(run_out + ".config", to_config_text(cfg));
            }
            return 0;
        }

        const bool is_plot = static_cast<bool>(*plotdata);
        const CommonFlags& common = is_plot ? plot_common : cmp_common;
        const SweepFlags& flags = is_plot ? plot_flags : cmp_flags;
        const Comparison cmp = sweep(common, flags, is_plot ? plotdata : compare);

        if (!flags.out.empty()) {
            const std::filesystem::path dir(flags.out);
            std::filesystem::create_directories(dir);
            ScenarioConfig effective = base_config(common);
            write_text(dir / "config.txt", to_config_text(effective));
            if (is_plot) {
                for (auto [fig, name] : {std::pair{Figure::Energy, "energy.csv"}, std::pair{Figure::Overload, "overload.csv"},
                                         std::pair{Figure::Dead, "dead.csv"}}) {
                    std::ofstream out(dir / name, std::ios::binary);
                    write_figure_csv(out, cmp, fig);
                }
            } else {
                for (std::int64_t n : cmp.sizes) {
                    std::ofstream out(dir / ("compare_" + std::to_string(n) + ".csv"), std::ios::binary);
                    write_comparison_csv(out, cmp, n);
                }
                std::ofstream out(dir / "summary.csv", std::ios::binary);
                write_summary_csv(out, cmp);
            }
        } else {
            for (std::int64_t n : cmp.sizes) write_comparison_csv(std::cout, cmp, n);
        }
        print_summary(flags.out.empty() ? std::cerr : std::cout, cmp);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
