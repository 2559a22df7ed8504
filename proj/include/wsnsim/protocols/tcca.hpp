#pragma once

// TCCA: energy-scaled election with multi-hop clusters bounded by a TTL.
//
// Advertisements spread in waves. A node receiving an advertisement with
// TTL t > 1 rebroadcasts its best advertisement once with TTL t - 1. A node
// adopts the advertisement with the fewest hops, then the shortest last
// link, then the lowest CH id. Joins, reports and schedules follow the
// recorded relay chain; every hop is charged to the relaying node.

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "wsnsim/protocols/common.hpp"

namespace wsnsim {

class TccaEngine : public RoundEngine {
public:
    explicit TccaEngine(ProtocolParams params) : RoundEngine(std::move(params)) {}

    Protocol protocol() const override { return Protocol::Tcca; }

protected:
    void execute(RoundContext& ctx) override {
        Network& net = ctx.net();
        const std::uint64_t round = net.round_index();
        RoundReport& report = ctx.report();
        const std::size_t n = net.size();

        std::vector<bool> is_ch(n, false);
        std::vector<NodeId> heads;
        for (Node& node : net.nodes()) {
            node.role = Role::Member;
            if (!node.alive) continue;
            if (self_elect(node, round, Protocol::Tcca, params_.election, net.rng()) != ElectionOutcome::NotCH) {
                node.role = Role::ClusterHead;
                is_ch[node.id] = true;
                heads.push_back(node.id);
            }
        }
        report.ch_count = static_cast<std::uint32_t>(heads.size());

        std::vector<std::optional<Offer>> best(n);
        auto offer = [&](NodeId j, const Offer& o) {
            if (is_ch[j]) return;
            if (!best[j] || o.better_than(*best[j])) best[j] = o;
        };

        const Message adv = compose(Protocol::Tcca, MessageKind::Adv);
        for (NodeId ch : heads) {
            const std::uint32_t ttl = initial_ttl(net.node(ch));
            const Point at = net.node(ch).pos;
            for (NodeId j : ctx.broadcast(adv, ch))
                offer(j, Offer{ch, 1, distance(net.node(j).pos, at), ch, ttl});
        }

        const Message relay = compose(Protocol::Tcca, MessageKind::AdvRelay);
        std::vector<bool> relayed(n, false);
        for (std::uint32_t hops = 1;; ++hops) {
            std::vector<NodeId> wave;
            for (NodeId j = 0; j < n; ++j)
                if (best[j] && best[j]->hops == hops && best[j]->ttl > 1 && !relayed[j]) wave.push_back(j);
            if (wave.empty()) break;
            for (NodeId r : wave) {
                relayed[r] = true;
                const Offer carried = *best[r];
                const Point at = net.node(r).pos;
                for (NodeId j : ctx.broadcast(relay, r))
                    offer(j, Offer{carried.ch, hops + 1, distance(net.node(j).pos, at), r, carried.ttl - 1});
            }
        }

        // Joins travel the reverse chain hop by hop.
        std::vector<bool> attempted(n, false);
        const Message join = compose(Protocol::Tcca, MessageKind::Join);
        for (NodeId ch : heads) assignment_.clusters.try_emplace(ch, Cluster{ch, {}, std::nullopt});
        for (NodeId j = 0; j < n; ++j) {
            if (!best[j] || !net.node(j).alive) continue;
            attempted[j] = true;
            std::vector<NodeId> relays;
            for (NodeId hop = best[j]->parent; hop != best[j]->ch; hop = best[hop]->parent) relays.push_back(hop);
            if (!along_path(ctx, join, j, relays, best[j]->ch)) continue;
            Cluster& c = assignment_.clusters[best[j]->ch];
            c.members.push_back({j, static_cast<std::uint32_t>(c.members.size()), std::move(relays), false});
        }

        for (const auto& [ch, cluster] : assignment_.clusters) {
            if (cluster.members.empty()) continue;
            const Message schedule = compose(Protocol::Tcca, MessageKind::Schedule, cluster.members.size());
            ctx.broadcast(schedule, ch);
            std::set<NodeId> forwarders;
            for (const ClusterMember& m : cluster.members) forwarders.insert(m.relays.begin(), m.relays.end());
            for (NodeId r : forwarders) ctx.broadcast(schedule, r);
        }

        std::vector<std::uint32_t> aggregated(n, 0);
        const Message data = compose(Protocol::Tcca, MessageKind::Report);
        for (const auto& [ch, cluster] : assignment_.clusters)
            for (const ClusterMember& m : cluster.members)
                if (along_path(ctx, data, m.id, m.relays, ch)) ++aggregated[ch];

        const Message bs_packet = compose(Protocol::Tcca, MessageKind::BsPacket);
        for (const auto& [ch, cluster] : assignment_.clusters) {
            report.member_count += static_cast<std::uint32_t>(cluster.members.size());
            if (!ctx.to_bs(bs_packet, ch)) continue;
            ++report.bs_packets;
            report.readings_delivered += 1 + aggregated[ch];
        }

        const Message direct = compose(Protocol::Tcca, MessageKind::DirectBsPacket);
        for (const Node& node : net.nodes()) {
            if (!node.alive || is_ch[node.id] || attempted[node.id]) continue;
            assignment_.orphans.push_back(node.id);
            if (!ctx.to_bs(direct, node.id)) continue;
            ++report.bs_packets;
            ++report.readings_delivered;
        }
        report.orphan_count = static_cast<std::uint32_t>(assignment_.orphans.size());
    }

private:
    struct Offer {
        NodeId ch = 0;
        std::uint32_t hops = 0;
        double link_m = 0.0;  // distance to the node it was heard from
        NodeId parent = 0;
        std::uint32_t ttl = 0;  // TTL as received

        bool better_than(const Offer& o) const {
            return std::tie(hops, link_m, ch) < std::tie(o.hops, o.link_m, o.ch);
        }
    };

    std::uint32_t initial_ttl(const Node& ch) const {
        const TccaParams& t = params_.tcca;
        if (!t.energy_scaled_ttl) return t.initial_ttl;
        const double ratio = ch.max_energy > 0.0 ? ch.residual_energy / ch.max_energy : 0.0;
        return 1 + static_cast<std::uint32_t>(std::lround(static_cast<double>(t.ttl_max) * ratio));
    }

    // Sends `m` from `from` through `relays` to `to`; false if any hop fails.
    static bool along_path(RoundContext& ctx, const Message& m, NodeId from, const std::vector<NodeId>& relays,
                           NodeId to) {
        NodeId at = from;
        for (NodeId r : relays) {
            if (!ctx.unicast(m, at, r)) return false;
            at = r;
        }
        return ctx.unicast(m, at, to);
    }
};

}  // namespace wsnsim
