#pragma once

// LEACH and Sec-LEACH. Sec-LEACH runs the same message sequence with key
// agreement, MACs and freshness checks layered on; with zero-width security
// fields and universal key rings the two are indistinguishable.
//
// Event order within a round:
//   1. election, ascending node id (one draw per alive node)
//   2. Adv broadcast by each CH, ascending id
//   3. Join from each non-CH to its nearest (key-sharing) CH, ascending id
//   4. Schedule broadcast by each CH with members
//   5. Report per member, clusters ascending, slots ascending
//   6. BsPacket per CH
//   7. DirectBsPacket per uncovered node, ascending id

#include <limits>
#include <optional>
#include <vector>

#include "wsnsim/protocols/common.hpp"

namespace wsnsim {

class LeachEngine : public RoundEngine {
public:
    explicit LeachEngine(ProtocolParams params) : RoundEngine(std::move(params)) {}

    /// Sec-LEACH engine with the given key material.
    LeachEngine(ProtocolParams params, KeyMaterial keys) : RoundEngine(std::move(params)), keys_(std::move(keys)) {}

    Protocol protocol() const override { return keys_ ? Protocol::SecLeach : Protocol::Leach; }
    const std::optional<KeyMaterial>& keys() const { return keys_; }

protected:
    void execute(RoundContext& ctx) override {
        Network& net = ctx.net();
        const std::uint64_t round = net.round_index();
        const Protocol proto = protocol();
        RoundReport& report = ctx.report();
        const std::size_t n = net.size();

        std::vector<bool> is_ch(n, false);
        std::vector<NodeId> heads;
        for (Node& node : net.nodes()) {
            node.role = Role::Member;
            node.remembered_ch.reset();
            if (!node.alive) continue;
            if (self_elect(node, round, proto, params_.election, net.rng()) != ElectionOutcome::NotCH) {
                node.role = Role::ClusterHead;
                is_ch[node.id] = true;
                heads.push_back(node.id);
            }
        }
        report.ch_count = static_cast<std::uint32_t>(heads.size());

        // Advertisements; each non-CH keeps the list of CHs it heard.
        std::vector<std::vector<NodeId>> heard(n);
        const Message adv = compose(proto, MessageKind::Adv);
        for (NodeId ch : heads) {
            for (NodeId j : ctx.broadcast(adv, ch))
                if (!is_ch[j]) heard[j].push_back(ch);
        }

        // Joins.
        std::vector<std::optional<NodeId>> joined(n);
        const Message join = compose(proto, MessageKind::Join);
        for (const Node& node : net.nodes()) {
            if (!node.alive || is_ch[node.id]) continue;
            const std::optional<NodeId> target = pick_head(net, node.id, heard[node.id]);
            if (!target) continue;
            joined[node.id] = *target;
            if (!ctx.unicast(join, node.id, *target)) continue;
            if (!accept_join(node.id, *target, round)) continue;
            add_member(*target, node.id);
            if (params_.replay.joins) {
                if (accept_join(node.id, *target, round)) add_member(*target, node.id);
                else ++report.replays_rejected;
            }
        }
        for (NodeId ch : heads) assignment_.clusters.try_emplace(ch, Cluster{ch, {}, std::nullopt});

        for (auto& [ch, cluster] : assignment_.clusters) {
            if (cluster.members.empty()) continue;
            ctx.broadcast(compose(proto, MessageKind::Schedule, cluster.members.size()), ch);
        }

        // Steady state.
        std::vector<std::uint32_t> aggregated(n, 0);
        const Message data = compose(proto, MessageKind::Report);
        for (auto& [ch, cluster] : assignment_.clusters) {
            for (const ClusterMember& m : cluster.members) {
                if (!ctx.unicast(data, m.id, ch)) continue;
                if (!accept_report(m.id, ch, round)) continue;
                ++aggregated[ch];
                if (params_.replay.reports) {
                    if (accept_report(m.id, ch, round)) ++aggregated[ch];
                    else ++report.replays_rejected;
                }
            }
        }
        const Message bs_packet = compose(proto, MessageKind::BsPacket);
        for (const auto& [ch, cluster] : assignment_.clusters) {
            if (!ctx.to_bs(bs_packet, ch)) continue;
            bs_accept(ch);
            ++report.bs_packets;
            report.readings_delivered += 1 + aggregated[ch];
        }
        report.member_count = 0;
        for (const auto& [ch, cluster] : assignment_.clusters)
            report.member_count += static_cast<std::uint32_t>(cluster.members.size());

        const Message direct = compose(proto, MessageKind::DirectBsPacket);
        for (const Node& node : net.nodes()) {
            if (is_ch[node.id] || joined[node.id] || !node.alive) continue;
            assignment_.orphans.push_back(node.id);
            if (!ctx.to_bs(direct, node.id)) continue;
            bs_accept(node.id);
            ++report.bs_packets;
            ++report.readings_delivered;
        }
        report.orphan_count = static_cast<std::uint32_t>(assignment_.orphans.size());
    }

private:
    // Nearest heard CH (sharing a key under Sec-LEACH); ties to lower id.
    std::optional<NodeId> pick_head(const Network& net, NodeId self, const std::vector<NodeId>& heard) const {
        std::optional<NodeId> best;
        double best_d2 = std::numeric_limits<double>::infinity();
        const Point p = net.node(self).pos;
        for (NodeId ch : heard) {
            if (keys_ && !keys_->shared(self, ch)) continue;
            const double d2 = distance_sq(p, net.node(ch).pos);
            if (d2 < best_d2 || (d2 == best_d2 && ch < *best)) {
                best = ch;
                best_d2 = d2;
            }
        }
        return best;
    }

    // Sender tags with its view of the link key, the CH verifies with its own
    // view, then checks freshness. The CH only accepts after both pass.
    bool verify(NodeId member, NodeId ch, const Freshness& fresh) {
        const std::uint32_t bits = params_.sizes.mac_bits;
        const std::uint64_t tag = link_tag(*keys_, *keys_->shared(member, ch), bits, {member, ch, fresh.value});
        if (link_tag(*keys_, *keys_->shared(ch, member), bits, {member, ch, fresh.value}) != tag) return false;
        return keys_->ledger().check({member, ch}, fresh) == FreshnessVerdict::Accept;
    }

    bool accept_join(NodeId member, NodeId ch, std::uint64_t round) {
        if (!keys_) return true;
        return verify(member, ch, Freshness::echo(keys_->nonce(ch, round), round));
    }

    bool accept_report(NodeId member, NodeId ch, std::uint64_t round) {
        if (!keys_) return true;
        return verify(member, ch, Freshness::nonce(keys_->nonce(ch, round), round));
    }

    void bs_accept(NodeId sender) {
        if (!keys_) return;
        keys_->ledger().check({sender, kBaseStation}, Freshness::counter(keys_->next_counter(sender)));
    }

    void add_member(NodeId ch, NodeId member) {
        Cluster& c = assignment_.clusters[ch];
        c.head = ch;
        c.members.push_back({member, static_cast<std::uint32_t>(c.members.size()), {}, false});
    }

    std::optional<KeyMaterial> keys_;
};

}  // namespace wsnsim
