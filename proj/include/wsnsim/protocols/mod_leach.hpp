#pragma once

// Mod-LEACH and Mod-Sec-LEACH: full and half transmission rounds.
//
// Every alive node takes one of three paths in a round:
//   serving CH  second round of a two-round term; skips election
//   half path   member holding a remembered two-round CH; unicasts its
//               report to that CH and skips election
//   full path   elects itself (Eq. 3, then Eq. 4 on the same draw); a
//               non-CH broadcasts its report to direct neighbours and waits
//               for confirmation requests from listening CHs
//
// Event order within a round:
//   1. election over full-path nodes, ascending id
//   2. half-path reports, ascending member id
//   3. full-path report broadcasts, ascending id; only CHs listen
//   4. ConfirmRequest per CH holding stored reports, ascending CH id
//   5. MemberAck per confirmed broadcaster, ascending id (prefers a
//      two-round CH; ties broken by one uniform draw)
//   6. BsPacket per CH, ascending id
//   7. ChAck from each serving CH to its half-path members
//   8. DirectBsPacket per unconfirmed broadcaster, ascending id

#include <algorithm>
#include <optional>
#include <vector>

#include "wsnsim/protocols/common.hpp"

namespace wsnsim {

class ModLeachEngine : public RoundEngine {
public:
    explicit ModLeachEngine(ProtocolParams params) : RoundEngine(std::move(params)) {}

    /// Mod-Sec-LEACH engine with the given key material.
    ModLeachEngine(ProtocolParams params, KeyMaterial keys)
        : RoundEngine(std::move(params)), keys_(std::move(keys)) {}

    Protocol protocol() const override { return keys_ ? Protocol::ModSecLeach : Protocol::ModLeach; }
    const std::optional<KeyMaterial>& keys() const { return keys_; }

protected:
    void execute(RoundContext& ctx) override {
        Network& net = ctx.net();
        const std::uint64_t round = net.round_index();
        const Protocol proto = protocol();
        RoundReport& report = ctx.report();
        const std::size_t n = net.size();

        enum class Path : std::uint8_t { Inactive, Serving, Half, Full };
        std::vector<Path> path(n, Path::Inactive);
        std::vector<std::optional<Ability>> head(n);  // ability offered this round
        for (Node& node : net.nodes()) {
            node.role = Role::Member;
            if (!node.alive) {
                node.remembered_ch.reset();
                node.ch_term_remaining = 0;
                continue;
            }
            if (node.ch_term_remaining > 0) {
                path[node.id] = Path::Serving;
                node.role = Role::ClusterHead;
                head[node.id] = Ability::OneRound;
            } else if (node.remembered_ch && node.remembered_ch->rounds_remaining > 0) {
                path[node.id] = Path::Half;
            } else {
                path[node.id] = Path::Full;
            }
        }

        for (Node& node : net.nodes()) {
            if (path[node.id] != Path::Full) continue;
            const ElectionOutcome out = self_elect(node, round, proto, params_.election, net.rng());
            if (out == ElectionOutcome::NotCH) continue;
            node.role = Role::ClusterHead;
            head[node.id] = out == ElectionOutcome::CH_TwoRounds ? Ability::TwoRounds : Ability::OneRound;
        }
        for (NodeId i = 0; i < n; ++i) {
            if (!head[i]) continue;
            ++report.ch_count;
            assignment_.clusters.emplace(i, Cluster{i, {}, head[i]});
        }

        std::vector<std::uint32_t> aggregated(n, 0);
        bool any_half = false;

        // Half path.
        const Message half_report = compose_half_round_report(proto);
        std::vector<std::vector<NodeId>> half_members(n);
        for (NodeId j = 0; j < n; ++j) {
            if (path[j] != Path::Half) continue;
            any_half = true;
            const NodeId ch = net.node(j).remembered_ch->ch;
            net.node(j).remembered_ch->rounds_remaining = 0;
            const bool ch_serving = path[ch] == Path::Serving;
            const std::uint64_t counter = next_counter(j);
            if (!ctx.unicast(half_report, j, ch) || !ch_serving) continue;
            if (!accept(j, ch, counter, round)) continue;
            half_members[ch].push_back(j);
            add_member(ch, j, true);
            ++aggregated[ch];
            if (params_.replay.reports) {
                if (accept(j, ch, counter, round)) ++aggregated[ch];
                else ++report.replays_rejected;
            }
        }

        // Full path: broadcasts heard only by listening CHs.
        auto listens = [&](NodeId i) {
            if (!head[i]) return false;
            return path[i] != Path::Serving || params_.mod_second_term_confirms;
        };
        std::vector<std::vector<NodeId>> stored(n);
        const Message full_report = compose(proto, MessageKind::Report);
        std::vector<NodeId> broadcasters;
        for (NodeId j = 0; j < n; ++j) {
            if (path[j] != Path::Full || head[j]) continue;
            broadcasters.push_back(j);
            const std::uint64_t counter = next_counter(j);
            for (NodeId ch : ctx.broadcast(full_report, j, listens)) {
                if (!accept(j, ch, counter, round)) continue;
                stored[ch].push_back(j);
                if (!params_.replay.reports) continue;
                if (accept(j, ch, counter, round)) stored[ch].push_back(j);
                else ++report.replays_rejected;
            }
        }

        // Confirmation requests; broadcasters are awake waiting for them.
        std::vector<std::uint8_t> awaiting(n, 0);
        for (NodeId j : broadcasters) awaiting[j] = 1;
        std::vector<std::vector<NodeId>> offers(n);
        for (NodeId ch = 0; ch < n; ++ch) {
            if (stored[ch].empty()) continue;
            const Message confirm = compose(proto, MessageKind::ConfirmRequest, stored[ch].size());
            const std::vector<NodeId> heard = ctx.broadcast(confirm, ch, [&](NodeId j) { return awaiting[j] != 0; });
            for (NodeId j : stored[ch])
                if (std::binary_search(heard.begin(), heard.end(), j)) offers[j].push_back(ch);
        }

        const Message ack = compose(proto, MessageKind::MemberAck);
        std::vector<bool> confirmed(n, false);
        for (NodeId j : broadcasters) {
            std::vector<NodeId>& opts = offers[j];
            if (opts.empty()) continue;
            opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
            const bool any_two = std::any_of(opts.begin(), opts.end(),
                                             [&](NodeId c) { return head[c] == Ability::TwoRounds; });
            if (any_two)
                std::erase_if(opts, [&](NodeId c) { return head[c] != Ability::TwoRounds; });
            const NodeId ch = opts.size() == 1 ? opts.front() : opts[uniform_index(net.rng(), opts.size())];
            confirmed[j] = true;
            if (head[ch] == Ability::TwoRounds) net.node(j).remembered_ch = RememberedCh{ch, 1};
            const std::uint64_t counter = next_counter(j);
            if (!ctx.unicast(ack, j, ch)) continue;
            if (!accept(j, ch, counter, round)) continue;
            add_member(ch, j, false);
            ++aggregated[ch];
            if (params_.replay.joins) {
                if (accept(j, ch, counter, round)) {
                    add_member(ch, j, false);
                    ++aggregated[ch];
                } else {
                    ++report.replays_rejected;
                }
            }
        }

        const Message bs_packet = compose(proto, MessageKind::BsPacket);
        for (const auto& [ch, cluster] : assignment_.clusters) {
            report.member_count += static_cast<std::uint32_t>(cluster.members.size());
            if (!ctx.to_bs(bs_packet, ch)) continue;
            bs_accept(ch);
            ++report.bs_packets;
            report.readings_delivered += 1 + aggregated[ch];
        }

        const Message ch_ack = compose(proto, MessageKind::ChAck);
        for (NodeId ch = 0; ch < n; ++ch) {
            for (NodeId j : half_members[ch]) ctx.unicast(ch_ack, ch, j);
        }
        for (Node& node : net.nodes()) {
            if (path[node.id] == Path::Half) node.remembered_ch.reset();
            if (path[node.id] == Path::Serving) node.ch_term_remaining = 0;
            else if (head[node.id] == Ability::TwoRounds) node.ch_term_remaining = node.alive ? 1 : 0;
            if (!node.alive) node.remembered_ch.reset();
        }

        const Message direct = compose(proto, MessageKind::DirectBsPacket);
        for (NodeId j : broadcasters) {
            if (confirmed[j]) continue;
            assignment_.orphans.push_back(j);
            if (!ctx.to_bs(direct, j)) continue;
            bs_accept(j);
            ++report.bs_packets;
            ++report.readings_delivered;
        }
        report.orphan_count = static_cast<std::uint32_t>(assignment_.orphans.size());
        report.kind = any_half ? RoundKind::HalfTransmission : RoundKind::FullTransmission;
    }

private:
    // Under Mod-Sec-LEACH: the receiver must share a key with the sender, the
    // MAC must verify under it and the sender's counter must be fresh.
    bool accept(NodeId sender, NodeId receiver, std::uint64_t counter, std::uint64_t round) {
        if (!keys_) return true;
        const std::optional<KeyId> key = keys_->shared(sender, receiver);
        if (!key) return false;
        const std::uint32_t bits = params_.sizes.mac_bits;
        const std::uint64_t tag = link_tag(*keys_, *key, bits, {sender, receiver, counter, round});
        if (link_tag(*keys_, *keys_->shared(receiver, sender), bits, {sender, receiver, counter, round}) != tag)
            return false;
        return keys_->ledger().check({sender, receiver}, Freshness::counter(counter)) == FreshnessVerdict::Accept;
    }

    // Counter stamped on the sender's next message (0 when unsecured).
    std::uint64_t next_counter(NodeId sender) { return keys_ ? keys_->next_counter(sender) : 0; }

    void bs_accept(NodeId sender) {
        if (!keys_) return;
        keys_->ledger().check({sender, kBaseStation}, Freshness::counter(keys_->next_counter(sender)));
    }

    void add_member(NodeId ch, NodeId member, bool half) {
        Cluster& c = assignment_.clusters[ch];
        c.head = ch;
        c.members.push_back({member, static_cast<std::uint32_t>(c.members.size()), {}, half});
    }

    std::optional<KeyMaterial> keys_;
};

}  // namespace wsnsim
