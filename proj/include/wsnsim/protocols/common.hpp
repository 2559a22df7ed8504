#pragma once

// Shared round machinery: per-round report, cluster assignment, and the
// event context through which every transmission and reception is charged.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "wsnsim/election.hpp"
#include "wsnsim/keying.hpp"
#include "wsnsim/model.hpp"
#include "wsnsim/radio.hpp"

namespace wsnsim {

enum class RoundKind { Standard, FullTransmission, HalfTransmission };

struct RoundReport {
    std::uint64_t round = 0;
    RoundKind kind = RoundKind::Standard;
    std::uint64_t transmissions = 0;
    std::uint64_t receptions = 0;
    std::uint64_t bits_control = 0;
    std::uint64_t bits_data = 0;
    std::uint64_t bits_security = 0;
    double energy_nj = 0.0;
    std::uint32_t ch_count = 0;
    std::uint32_t member_count = 0;
    std::uint32_t orphan_count = 0;
    std::uint32_t deaths = 0;
    std::uint32_t alive_at_start = 0;
    std::uint32_t alive_at_end = 0;
    // Packets (aggregated or direct) that reached the BS.
    std::uint32_t bs_packets = 0;
    // Individual node readings carried inside those packets.
    std::uint32_t readings_delivered = 0;
    // Readings of nodes alive at round start that never reached the BS.
    std::uint32_t readings_lost = 0;
    std::uint32_t replays_rejected = 0;
    std::array<std::uint32_t, kMessageKindCount> tx_by_kind{};

    std::uint64_t bits_total() const { return bits_control + bits_data + bits_security; }
    std::uint32_t tx_count(MessageKind k) const { return tx_by_kind[static_cast<std::size_t>(k)]; }
};

/// Transmitted bits beyond one ideal data payload per packet delivered to
/// the BS.
inline std::uint64_t overload_bits(const RoundReport& r, const SizeTable& sizes) {
    const std::uint64_t ideal = static_cast<std::uint64_t>(sizes.data_bits) * r.bs_packets;
    const std::uint64_t total = r.bits_total();
    return total > ideal ? total - ideal : 0;
}

enum class Ability { OneRound, TwoRounds };

struct ClusterMember {
    NodeId id = 0;
    std::uint32_t slot = 0;
    // Relay ids from the member toward the CH, excluding both ends (TCCA).
    std::vector<NodeId> relays;
    bool half_round = false;  // Mod-*: reused a remembered CH this round
};

struct Cluster {
    NodeId head = 0;
    std::vector<ClusterMember> members;
    std::optional<Ability> ability;  // Mod-* only
};

struct ClusterAssignment {
    std::map<NodeId, Cluster> clusters;
    std::vector<NodeId> orphans;

    const Cluster* cluster_of_head(NodeId ch) const {
        auto it = clusters.find(ch);
        return it == clusters.end() ? nullptr : &it->second;
    }
    std::optional<NodeId> head_of(NodeId member) const {
        for (const auto& [head, c] : clusters)
            for (const ClusterMember& m : c.members)
                if (m.id == member) return head;
        return std::nullopt;
    }
};

struct TccaParams {
    std::uint32_t initial_ttl = 2;
    // When set, TTL = 1 + round(ttl_max * RE / MaxE) per CH.
    bool energy_scaled_ttl = false;
    std::uint32_t ttl_max = 2;
};

/// Test hook: re-deliver each accepted join/report a second time to its
/// receiver. Replayed frames are not charged.
struct ReplayProbe {
    bool joins = false;
    bool reports = false;
};

struct ProtocolParams {
    ElectionParams election;
    RadioParams radio;
    SizeTable sizes;
    KeyingParams keying;
    TccaParams tcca;
    ReplayProbe replay;
    // Mod-*: a CH serving the second round of a two-round term also confirms
    // full-round broadcasters (offering a one-round term).
    bool mod_second_term_confirms = true;
};

/// Charges events against the network and tallies them into a RoundReport.
/// Dead nodes neither send nor receive.
class RoundContext {
public:
    RoundContext(Network& net, const ProtocolParams& params, RoundReport& report)
        : net_(net), params_(params), report_(report) {}

    Network& net() { return net_; }
    const ProtocolParams& params() const { return params_; }
    RoundReport& report() { return report_; }

    /// Point-to-point send. Returns true when the receiver got the frame.
    bool unicast(const Message& m, NodeId from, NodeId to) {
        if (!send(m, from, distance(net_.node(from).pos, net_.node(to).pos))) return false;
        return receive(m, to);
    }

    /// Sends to the BS at true distance. Returns true when sent.
    bool to_bs(const Message& m, NodeId from) {
        return send(m, from, distance(net_.node(from).pos, net_.bs_pos()));
    }

    /// Broadcast at radio range. Every alive node in range accepted by
    /// `listening` pays reception; their ids are returned ascending.
    template <typename Listening>
    std::vector<NodeId> broadcast(const Message& m, NodeId from, Listening&& listening) {
        std::vector<NodeId> heard;
        if (!send(m, from, net_.radio_range())) return heard;
        const double bits = bits_of(m);
        net_.for_each_alive_within(net_.node(from).pos, net_.radio_range(), from, [&](NodeId j) {
            if (listening(j)) heard.push_back(j);
        });
        std::sort(heard.begin(), heard.end());
        const double cost = rx_cost(params_.radio, bits);
        for (NodeId j : heard) {
            net_.charge(j, cost);
            ++report_.receptions;
        }
        return heard;
    }

    std::vector<NodeId> broadcast(const Message& m, NodeId from) {
        return broadcast(m, from, [](NodeId) { return true; });
    }

    double bits_of(const Message& m) const { return static_cast<double>(size_of(params_.sizes, m)); }

private:
    bool send(const Message& m, NodeId from, double dist) {
        if (!net_.node(from).alive) return false;
        const BitBreakdown b = breakdown(params_.sizes, m);
        net_.charge(from, tx_cost(params_.radio, static_cast<double>(b.total()), dist));
        ++report_.transmissions;
        ++report_.tx_by_kind[static_cast<std::size_t>(m.kind)];
        report_.bits_control += b.control;
        report_.bits_data += b.data;
        report_.bits_security += b.security;
        return true;
    }

    bool receive(const Message& m, NodeId to) {
        if (!net_.node(to).alive) return false;
        net_.charge(to, rx_cost(params_.radio, bits_of(m)));
        ++report_.receptions;
        return true;
    }

    Network& net_;
    const ProtocolParams& params_;
    RoundReport& report_;
};

/// MAC tag over a few message fields with the given link key.
inline std::uint64_t link_tag(const KeyMaterial& keys, KeyId key, std::uint32_t mac_bits,
                              std::initializer_list<std::uint64_t> fields) {
    MacPayload payload;
    for (std::uint64_t f : fields) payload.add(f);
    return mac(keys.pool().value(key), payload.bytes(), mac_bits);
}

/// Common interface of the five round engines.
class RoundEngine {
public:
    virtual ~RoundEngine() = default;
    virtual Protocol protocol() const = 0;

    /// Runs one complete round on `net` (epoch bookkeeping included) and
    /// advances its round index.
    RoundReport run_round(Network& net) {
        RoundReport report;
        report.round = net.round_index();
        report.alive_at_start = static_cast<std::uint32_t>(net.alive_count());
        const double consumed_before = net.consumed_total();
        advance_epoch(net, net.round_index(), params_.election);
        assignment_ = {};
        RoundContext ctx(net, params_, report);
        execute(ctx);
        report.alive_at_end = static_cast<std::uint32_t>(net.alive_count());
        report.deaths = report.alive_at_start - report.alive_at_end;
        report.energy_nj = net.consumed_total() - consumed_before;
        report.readings_lost = report.alive_at_start - report.readings_delivered;
        net.advance_round();
        return report;
    }

    const ClusterAssignment& last_assignment() const { return assignment_; }
    const ProtocolParams& params() const { return params_; }

protected:
    explicit RoundEngine(ProtocolParams params) : params_(std::move(params)) { params_.election.validate(); }
    virtual void execute(RoundContext& ctx) = 0;

    ProtocolParams params_;
    ClusterAssignment assignment_;
};

}  // namespace wsnsim
