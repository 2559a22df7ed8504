#pragma once

// Cluster-head election thresholds and the per-round self-election draw.
//
//   leach      p / (1 - p * (r mod 1/p))                        if in G
//   tcca       max(leach * re / max_e, t_min)                   if in G
//   mod, two   max(leach * re / (2 * max_e), t_min)             if in G
//   mod, one   max(leach * re / max_e, t_min)                   if in G
//
// Every threshold is 0 outside G and clamped to [0, 1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "wsnsim/model.hpp"
#include "wsnsim/protocol_kind.hpp"
#include "wsnsim/random.hpp"

namespace wsnsim {

struct ElectionParams {
    double p = 0.05;
    double t_min = 0.01;

    /// Rounds per epoch, round(1/p).
    std::uint64_t epoch_len() const { return static_cast<std::uint64_t>(std::llround(1.0 / p)); }

    /// True when 1/p is not an integer and the epoch length was rounded.
    bool epoch_rounded() const { return std::abs(1.0 / p - static_cast<double>(epoch_len())) > 1e-9; }

    void validate() const {
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("p", "must lie in (0, 1)");
        if (!(t_min >= 0.0 && t_min < 1.0)) throw ConfigError("t_min", "must lie in [0, 1)");
    }
};

namespace detail {

inline double leach_base(std::uint64_t round, double p, std::uint64_t epoch_len) {
    const double residue = static_cast<double>(round % epoch_len);
    const double denom = 1.0 - p * residue;
    if (round % epoch_len == epoch_len - 1) return 1.0;
    if (denom <= 0.0) throw std::domain_error("election threshold: non-positive denominator, p is misconfigured");
    return std::clamp(p / denom, 0.0, 1.0);
}

inline void check_energy(double re, double max_e) {
    if (!(max_e > 0.0)) throw std::domain_error("election threshold: max energy must be > 0");
    if (!(re >= 0.0 && re <= max_e)) throw std::domain_error("election threshold: residual energy outside [0, max]");
}

}  // namespace detail

inline double leach_threshold(bool in_g, std::uint64_t round, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("election threshold: p must lie in (0, 1)");
    if (!in_g) return 0.0;
    const ElectionParams params{p, 0.0};
    return detail::leach_base(round, p, params.epoch_len());
}

inline double tcca_threshold(bool in_g, std::uint64_t round, double p, double re, double max_e, double t_min) {
    detail::check_energy(re, max_e);
    if (!in_g) return 0.0;
    return std::clamp(std::max(leach_threshold(true, round, p) * (re / max_e), t_min), 0.0, 1.0);
}

inline double mod_two_round_threshold(bool in_g, std::uint64_t round, double p, double re, double max_e,
                                      double t_min) {
    detail::check_energy(re, max_e);
    if (!in_g) return 0.0;
    return std::clamp(std::max(leach_threshold(true, round, p) * (re / (max_e * 2.0)), t_min), 0.0, 1.0);
}

inline double mod_one_round_threshold(bool in_g, std::uint64_t round, double p, double re, double max_e,
                                      double t_min) {
    return tcca_threshold(in_g, round, p, re, max_e, t_min);
}

enum class ElectionOutcome { NotCH, CH_OneRound, CH_TwoRounds };

/// Decides the outcome for one node given its draw `u` in [0, 1). Pure; does
/// not touch the node.
inline ElectionOutcome decide(const Node& node, std::uint64_t round, Protocol protocol, const ElectionParams& params,
                              double u) {
    const bool in_g = node.in_election_set();
    const double re = node.residual_energy;
    const double max_e = node.max_energy;
    switch (protocol) {
        case Protocol::Leach:
        case Protocol::SecLeach:
            return u < leach_threshold(in_g, round, params.p) ? ElectionOutcome::CH_OneRound : ElectionOutcome::NotCH;
        case Protocol::Tcca:
            return u < tcca_threshold(in_g, round, params.p, re, max_e, params.t_min) ? ElectionOutcome::CH_OneRound
                                                                                      : ElectionOutcome::NotCH;
        case Protocol::ModLeach:
        case Protocol::ModSecLeach:
            if (u < mod_two_round_threshold(in_g, round, params.p, re, max_e, params.t_min))
                return ElectionOutcome::CH_TwoRounds;
            if (u < mod_one_round_threshold(in_g, round, params.p, re, max_e, params.t_min))
                return ElectionOutcome::CH_OneRound;
            return ElectionOutcome::NotCH;
    }
    return ElectionOutcome::NotCH;
}

/// One draw from `rng`, then `decide`. A winning node leaves G.
inline ElectionOutcome self_elect(Node& node, std::uint64_t round, Protocol protocol, const ElectionParams& params,
                                  Rng& rng) {
    const double u = uniform01(rng);
    const ElectionOutcome out = decide(node, round, protocol, params, u);
    if (out != ElectionOutcome::NotCH) node.epoch_flag = true;
    return out;
}

/// Resets G to every alive node at epoch boundaries.
inline void advance_epoch(Network& net, std::uint64_t round, const ElectionParams& params) {
    if (round % params.epoch_len() != 0) return;
    for (Node& n : net.nodes())
        if (n.alive) n.epoch_flag = false;
}

}  // namespace wsnsim
