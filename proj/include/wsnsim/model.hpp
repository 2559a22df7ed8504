#pragma once

// Network state: node placement, energy bookkeeping, liveness and the seeded
// random source. Energy is tracked in nanojoules throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsnsim/random.hpp"

namespace wsnsim {

using NodeId = std::uint32_t;
using KeyId = std::uint32_t;

/// Pseudo node id used for links that end at the base station.
inline constexpr NodeId kBaseStation = std::numeric_limits<NodeId>::max();

/// Thrown for invalid parameters; `key()` names the offending setting.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_sq(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Point a, Point b) { return std::sqrt(distance_sq(a, b)); }

enum class Role { Member, ClusterHead };

/// Member-side memory of a two-round cluster head (Mod-LEACH half rounds).
struct RememberedCh {
    NodeId ch = 0;
    int rounds_remaining = 0;
    friend bool operator==(const RememberedCh&, const RememberedCh&) = default;
};

struct Node {
    NodeId id = 0;
    Point pos;
    double residual_energy = 0.0;
    double max_energy = 0.0;
    bool alive = true;
    Role role = Role::Member;
    // Set once the node has served as CH in the current epoch; the election
    // set G is every alive node with this flag cleared.
    bool epoch_flag = false;
    std::optional<RememberedCh> remembered_ch;
    // Rounds left in a committed two-round CH term (0 or 1).
    int ch_term_remaining = 0;
    std::optional<std::vector<KeyId>> key_ring;
    std::optional<KeyId> pairwise_bs_key;

    bool in_election_set() const { return alive && !epoch_flag; }
};

struct DeploymentParams {
    double initial_energy_nj = 5e8;
    double radio_range = 30.0;
};

/// Uniform grid over the field with cell side equal to the radio range, so a
/// range query touches at most 3x3 cells.
class SpatialIndex {
public:
    SpatialIndex() = default;

    SpatialIndex(std::span<const Node> nodes, double field_side, double cell_side)
        : cell_(cell_side > 0.0 ? cell_side : 1.0) {
        dim_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(field_side / cell_)));
        cells_.assign(dim_ * dim_, {});
        for (const Node& n : nodes) cells_[cell_of(n.pos)].push_back(n.id);
    }

    double cell_side() const { return cell_; }

    template <typename Fn>
    void for_each_candidate(Point centre, double range, Fn&& fn) const {
        if (cells_.empty()) return;
        const auto span = static_cast<long>(std::ceil(range / cell_));
        const auto [cx, cy] = coords(centre);
        const long hi = static_cast<long>(dim_) - 1;
        for (long gy = std::max(0L, cy - span); gy <= std::min(hi, cy + span); ++gy)
            for (long gx = std::max(0L, cx - span); gx <= std::min(hi, cx + span); ++gx)
                for (NodeId id : cells_[static_cast<std::size_t>(gy) * dim_ + static_cast<std::size_t>(gx)])
                    fn(id);
    }

private:
    std::pair<long, long> coords(Point p) const {
        const long hi = static_cast<long>(dim_) - 1;
        const long gx = std::clamp(static_cast<long>(std::floor(p.x / cell_)), 0L, hi);
        const long gy = std::clamp(static_cast<long>(std::floor(p.y / cell_)), 0L, hi);
        return {gx, gy};
    }
    std::size_t cell_of(Point p) const {
        const auto [gx, gy] = coords(p);
        return static_cast<std::size_t>(gy) * dim_ + static_cast<std::size_t>(gx);
    }

    double cell_ = 1.0;
    std::size_t dim_ = 0;
    std::vector<std::vector<NodeId>> cells_;
};

class Network {
public:
    Network() = default;

    /// Builds a network from explicit positions (ids follow vector order).
    static Network from_positions(std::span<const Point> positions, double field_side, Point bs_pos,
                                  std::uint64_t seed, const DeploymentParams& params = {}) {
        validate(field_side, bs_pos, params);
        Network net;
        net.field_side_ = field_side;
        net.bs_pos_ = bs_pos;
        net.radio_range_ = params.radio_range;
        net.rng_.seed(seed);
        net.nodes_.reserve(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const Point p = positions[i];
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 ||
                p.x > field_side || p.y > field_side)
                throw ConfigError("position", "node " + std::to_string(i) + " lies outside the field");
            Node n;
            n.id = static_cast<NodeId>(i);
            n.pos = p;
            n.residual_energy = params.initial_energy_nj;
            n.max_energy = params.initial_energy_nj;
            n.alive = params.initial_energy_nj > 0.0;
            net.nodes_.push_back(std::move(n));
        }
        net.initial_total_ = params.initial_energy_nj * static_cast<double>(positions.size());
        net.index_ = SpatialIndex(net.nodes_, field_side, params.radio_range);
        return net;
    }

    std::span<Node> nodes() { return nodes_; }
    std::span<const Node> nodes() const { return nodes_; }
    Node& node(NodeId id) { return nodes_.at(id); }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }

    Point bs_pos() const { return bs_pos_; }
    double field_side() const { return field_side_; }
    double radio_range() const { return radio_range_; }
    std::uint64_t round_index() const { return round_index_; }
    void set_round_index(std::uint64_t r) { round_index_ = r; }
    void advance_round() { ++round_index_; }
    Rng& rng() { return rng_; }

    /// Debits up to `cost` from the node, clamping at zero. Returns the
    /// residual energy after the debit.
    double charge(NodeId id, double cost) {
        if (id >= nodes_.size()) throw std::out_of_range("charge: unknown node " + std::to_string(id));
        if (!(cost >= 0.0) || !std::isfinite(cost)) throw std::invalid_argument("charge: cost must be finite and >= 0");
        Node& n = nodes_[id];
        const double debit = std::min(cost, n.residual_energy);
        n.residual_energy -= debit;
        consumed_ += debit;
        if (n.residual_energy <= 0.0) {
            n.residual_energy = 0.0;
            n.alive = false;
        }
        return n.residual_energy;
    }

    /// Sum of every debit actually applied since deployment.
    double consumed_total() const { return consumed_; }
    double initial_total() const { return initial_total_; }
    double residual_total() const {
        double s = 0.0;
        for (const Node& n : nodes_) s += n.residual_energy;
        return s;
    }
    std::size_t alive_count() const {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.alive; }));
    }

    /// Alive nodes other than `id` within `range` (inclusive), ascending.
    std::vector<NodeId> neighbors_within(NodeId id, double range) const {
        const Node& self = node(id);
        std::vector<NodeId> out;
        if (!self.alive) return out;
        for_each_alive_within(self.pos, range, id, [&](NodeId j) { out.push_back(j); });
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Visits alive nodes within `range` of `centre`, skipping `exclude`.
    /// Visit order is unspecified.
    template <typename Fn>
    void for_each_alive_within(Point centre, double range, NodeId exclude, Fn&& fn) const {
        const double r2 = range * range;
        auto visit = [&](NodeId j) {
            if (j == exclude) return;
            const Node& n = nodes_[j];
            if (n.alive && distance_sq(n.pos, centre) <= r2) fn(j);
        };
        if (range <= index_.cell_side()) {
            index_.for_each_candidate(centre, range, visit);
        } else {
            for (const Node& n : nodes_) visit(n.id);
        }
    }

private:
    static void validate(double field_side, Point bs_pos, const DeploymentParams& params) {
        if (!std::isfinite(field_side) || field_side <= 0.0) throw ConfigError("field_side", "must be finite and > 0");
        if (!std::isfinite(bs_pos.x) || !std::isfinite(bs_pos.y)) throw ConfigError("bs_pos", "must be finite");
        if (!std::isfinite(params.initial_energy_nj) || params.initial_energy_nj < 0.0)
            throw ConfigError("initial_energy_nj", "must be finite and >= 0");
        if (!std::isfinite(params.radio_range) || params.radio_range < 0.0)
            throw ConfigError("radio_range", "must be finite and >= 0");
    }

    std::vector<Node> nodes_;
    Point bs_pos_;
    double field_side_ = 0.0;
    double radio_range_ = 30.0;
    std::uint64_t round_index_ = 0;
    Rng rng_;
    double initial_total_ = 0.0;
    double consumed_ = 0.0;
    SpatialIndex index_;
};

/// Places `n` nodes uniformly in [0, field_side]^2. Draw order: x then y,
/// ascending node id, from the root generator seeded with `seed`. The same
/// generator then continues into the simulation.
inline Network deploy(std::int64_t n, double field_side, Point bs_pos, std::uint64_t seed,
                      const DeploymentParams& params = {}) {
    if (n < 0) throw ConfigError("nodes", "must be >= 0");
    if (!std::isfinite(field_side) || field_side <= 0.0) throw ConfigError("field_side", "must be finite and > 0");
    Rng rng(seed);
    std::vector<Point> pos(static_cast<std::size_t>(n));
    for (Point& p : pos) {
        p.x = uniform01(rng) * field_side;
        p.y = uniform01(rng) * field_side;
    }
    Network net = Network::from_positions(pos, field_side, bs_pos, seed, params);
    // Continue the same stream past the placement draws.
    net.rng() = rng;
    return net;
}

/// Field side that keeps node density at 100 nodes per 100 m x 100 m.
inline double default_field_side(std::int64_t n) {
    return 100.0 * std::sqrt(static_cast<double>(std::max<std::int64_t>(n, 1)) / 100.0);
}

}  // namespace wsnsim
