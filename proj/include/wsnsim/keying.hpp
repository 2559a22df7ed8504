#pragma once

// Random key predistribution for the secured protocols. Key values are
// simulation tokens and the MAC is a non-cryptographic keyed hash; both exist
// so that link-key agreement and replay rejection can be exercised, not to
// provide any security.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "wsnsim/model.hpp"
#include "wsnsim/random.hpp"

namespace wsnsim {

struct KeyingParams {
    std::uint32_t pool_size = 1000;
    std::uint32_t ring_size = 50;

    void validate() const {
        if (ring_size > pool_size) throw ConfigError("ring_size", "must not exceed pool_size");
    }
};

class KeyPool {
public:
    KeyPool(std::uint64_t master_seed, std::uint32_t pool_size) : seed_(master_seed), size_(pool_size) {}

    std::uint32_t size() const { return size_; }

    /// Opaque token for key `id`. Ids at or past size() are the per-node
    /// pairwise BS keys.
    std::uint64_t value(KeyId id) const { return mix64(seed_, 0x6b6579ULL, id); }

    KeyId pairwise_bs_key(NodeId node) const { return size_ + node; }

private:
    std::uint64_t seed_;
    std::uint32_t size_;
};

/// Ring for `node_id`: the PRF stream mix64(seed, node, i), i = 0, 1, ...,
/// reduced to [0, pool_size) by rejection (unbiased), skipping ids already
/// drawn, until ring_size distinct ids are collected. Returned ascending.
inline std::vector<KeyId> assign_ring(std::uint64_t master_seed, NodeId node_id, std::uint32_t ring_size,
                                      std::uint32_t pool_size) {
    if (ring_size > pool_size) throw std::invalid_argument("assign_ring: ring_size exceeds pool_size");
    std::vector<KeyId> ring;
    if (ring_size == 0) return ring;
    if (ring_size == pool_size) {
        ring.resize(pool_size);
        for (std::uint32_t i = 0; i < pool_size; ++i) ring[i] = i;
        return ring;
    }
    std::vector<bool> taken(pool_size, false);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % pool_size;
    ring.reserve(ring_size);
    for (std::uint64_t i = 0; ring.size() < ring_size; ++i) {
        const std::uint64_t x = mix64(master_seed, node_id, i);
        if (x >= limit) continue;
        const auto id = static_cast<KeyId>(x % pool_size);
        if (taken[id]) continue;
        taken[id] = true;
        ring.push_back(id);
    }
    std::sort(ring.begin(), ring.end());
    return ring;
}

/// Probability that two independently drawn rings share no key:
/// C(pool - ring, ring) / C(pool, ring), as a running product.
inline double no_shared_key_probability(std::uint32_t pool_size, std::uint32_t ring_size) {
    if (ring_size > pool_size) throw std::invalid_argument("no_shared_key_probability: ring exceeds pool");
    if (2ULL * ring_size > pool_size) return 0.0;
    double p = 1.0;
    for (std::uint32_t i = 0; i < ring_size; ++i)
        p *= static_cast<double>(pool_size - ring_size - i) / static_cast<double>(pool_size - i);
    return p;
}

/// Smallest key id present in both (ascending) rings.
inline std::optional<KeyId> shared_key(std::span<const KeyId> a, std::span<const KeyId> b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else return *ia;
    }
    return std::nullopt;
}

/// Keyed hash: FNV-1a over the payload seeded with the key value, finished
/// with mix64, truncated to `mac_bits` (<= 64).
inline std::uint64_t mac(std::uint64_t key_value, std::span<const std::uint8_t> payload, std::uint32_t mac_bits) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(key_value);
    for (std::uint8_t byte : payload) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    }
    h = mix64(h, key_value);
    if (mac_bits >= 64) return h;
    if (mac_bits == 0) return 0;
    return h & ((std::uint64_t{1} << mac_bits) - 1);
}

inline bool verify_mac(std::uint64_t key_value, std::span<const std::uint8_t> payload, std::uint32_t mac_bits,
                       std::uint64_t tag) {
    return mac(key_value, payload, mac_bits) == tag;
}

/// Little-endian serialization of up to eight 64-bit message fields into a
/// MAC payload.
class MacPayload {
public:
    MacPayload& add(std::uint64_t v) {
        if (len_ + 8 > bytes_.size()) throw std::length_error("MacPayload: too many fields");
        for (int i = 0; i < 8; ++i) bytes_[len_++] = static_cast<std::uint8_t>(v >> (8 * i));
        return *this;
    }
    std::span<const std::uint8_t> bytes() const { return {bytes_.data(), len_}; }

private:
    std::array<std::uint8_t, 64> bytes_{};
    std::size_t len_ = 0;
};

struct Link {
    NodeId sender = 0;
    NodeId receiver = 0;
    friend bool operator==(const Link&, const Link&) = default;
};

/// A freshness value is either a strictly increasing counter, or a token
/// derived from (nonce, cycle) that may be used once per cycle.
struct Freshness {
    enum class Kind { Counter, NonceCycle } kind = Kind::Counter;
    std::uint64_t cycle = 0;  // NonceCycle only
    std::uint64_t value = 0;

    static Freshness counter(std::uint64_t c) { return {Kind::Counter, 0, c}; }
    /// Value derived from the CH nonce and the reporting cycle.
    static Freshness nonce(std::uint64_t nonce, std::uint64_t cycle) {
        return {Kind::NonceCycle, cycle, mix64(nonce, cycle)};
    }
    /// The CH nonce echoed verbatim (join requests).
    static Freshness echo(std::uint64_t nonce, std::uint64_t cycle) { return {Kind::NonceCycle, cycle, nonce}; }
};

enum class FreshnessVerdict { Accept, Reject };

class FreshnessLedger {
public:
    FreshnessVerdict check(Link link, const Freshness& f) {
        Entry& e = entries_[key(link)];
        if (f.kind == Freshness::Kind::Counter) {
            if (e.last_counter && f.value <= *e.last_counter) return FreshnessVerdict::Reject;
            e.last_counter = f.value;
            return FreshnessVerdict::Accept;
        }
        // Tokens from earlier cycles are stale; the current cycle keeps a set.
        if (e.cycle && f.cycle < *e.cycle) return FreshnessVerdict::Reject;
        if (!e.cycle || f.cycle > *e.cycle) {
            e.cycle = f.cycle;
            e.tokens.clear();
        }
        if (std::find(e.tokens.begin(), e.tokens.end(), f.value) != e.tokens.end()) return FreshnessVerdict::Reject;
        e.tokens.push_back(f.value);
        return FreshnessVerdict::Accept;
    }

    std::size_t links() const { return entries_.size(); }

private:
    struct Entry {
        std::optional<std::uint64_t> last_counter;
        std::optional<std::uint64_t> cycle;
        std::vector<std::uint64_t> tokens;
    };
    static std::uint64_t key(Link l) { return (std::uint64_t{l.sender} << 32) | l.receiver; }

    std::unordered_map<std::uint64_t, Entry> entries_;
};

inline FreshnessVerdict check_freshness(FreshnessLedger& ledger, Link link, const Freshness& f) {
    return ledger.check(link, f);
}

/// Pool, rings and per-node state for one secured run.
class KeyMaterial {
public:
    KeyMaterial(std::uint64_t master_seed, const KeyingParams& params, std::size_t nodes)
        : master_seed_(master_seed), params_(params), pool_(master_seed, params.pool_size) {
        params.validate();
        rings_.reserve(nodes);
        for (std::size_t i = 0; i < nodes; ++i)
            rings_.push_back(assign_ring(master_seed, static_cast<NodeId>(i), params.ring_size, params.pool_size));
        counters_.assign(nodes, 0);
    }

    const KeyPool& pool() const { return pool_; }
    const KeyingParams& params() const { return params_; }
    std::uint64_t master_seed() const { return master_seed_; }
    std::span<const KeyId> ring(NodeId n) const { return rings_.at(n); }
    std::optional<KeyId> shared(NodeId a, NodeId b) const { return shared_key(ring(a), ring(b)); }
    FreshnessLedger& ledger() { return ledger_; }

    /// Next value of the node's outgoing message counter (starts at 1).
    std::uint64_t next_counter(NodeId n) { return ++counters_.at(n); }

    /// Per-round CH nonce, derived so it never consumes the simulation RNG.
    std::uint64_t nonce(NodeId ch, std::uint64_t round) const { return mix64(master_seed_ ^ 0x6e6f6e6365ULL, ch, round); }

    /// Copies ring ids and the pairwise key id into the node records.
    void install(Network& net) const {
        for (Node& n : net.nodes()) {
            n.key_ring = rings_.at(n.id);
            n.pairwise_bs_key = pool_.pairwise_bs_key(n.id);
        }
    }

private:
    std::uint64_t master_seed_;
    KeyingParams params_;
    KeyPool pool_;
    std::vector<std::vector<KeyId>> rings_;
    std::vector<std::uint64_t> counters_;
    FreshnessLedger ledger_;
};

}  // namespace wsnsim
