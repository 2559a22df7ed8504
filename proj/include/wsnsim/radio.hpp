#pragma once

// First-order radio energy model and the declarative message size table.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wsnsim/model.hpp"
#include "wsnsim/protocol_kind.hpp"

namespace wsnsim {

struct RadioParams {
    double e_elec_nj_per_bit = 50.0;      // electronics, nJ/bit
    double e_amp_pj_per_bit_m2 = 100.0;   // amplifier, pJ/bit/m^2
};

/// Transmit cost in nJ: e_elec*bits + e_amp*bits*d^2.
inline double tx_cost(const RadioParams& radio, double bits, double distance_m) {
    if (!std::isfinite(bits) || !std::isfinite(distance_m) || bits < 0.0 || distance_m < 0.0)
        throw std::invalid_argument("tx_cost: bits and distance must be finite and >= 0");
    return radio.e_elec_nj_per_bit * bits + radio.e_amp_pj_per_bit_m2 * 1e-3 * bits * distance_m * distance_m;
}

/// Receive cost in nJ: e_elec*bits.
inline double rx_cost(const RadioParams& radio, double bits) {
    if (!std::isfinite(bits) || bits < 0.0) throw std::invalid_argument("rx_cost: bits must be finite and >= 0");
    return radio.e_elec_nj_per_bit * bits;
}

enum class Field : std::uint8_t {
    Control,    // ids and message-type baseline
    Data,       // sensing payload
    KeyId,
    Nonce,
    Counter,
    Mac,
    FlagRT,
    FlagPR,
    FlagAT,
    FlagACK,
    Ttl,
    Timestamp,
    SlotEntry,  // one (member id, slot) pair; repeatable
};
inline constexpr std::size_t kFieldCount = 13;

enum class BitClass { Control, Data, Security };

constexpr BitClass bit_class(Field f) {
    switch (f) {
        case Field::Data: return BitClass::Data;
        case Field::KeyId:
        case Field::Nonce:
        case Field::Counter:
        case Field::Mac: return BitClass::Security;
        default: return BitClass::Control;
    }
}

struct SizeTable {
    std::uint32_t control_bits = 50;
    std::uint32_t data_bits = 2000;
    std::uint32_t key_id_bits = 16;
    std::uint32_t nonce_bits = 32;
    std::uint32_t counter_bits = 16;
    std::uint32_t mac_bits = 32;
    std::uint32_t flag_bits = 1;
    std::uint32_t ttl_bits = 4;
    std::uint32_t timestamp_bits = 16;
    std::uint32_t slot_entry_bits = 24;

    std::uint32_t width(Field f) const {
        switch (f) {
            case Field::Control: return control_bits;
            case Field::Data: return data_bits;
            case Field::KeyId: return key_id_bits;
            case Field::Nonce: return nonce_bits;
            case Field::Counter: return counter_bits;
            case Field::Mac: return mac_bits;
            case Field::FlagRT:
            case Field::FlagPR:
            case Field::FlagAT:
            case Field::FlagACK: return flag_bits;
            case Field::Ttl: return ttl_bits;
            case Field::Timestamp: return timestamp_bits;
            case Field::SlotEntry: return slot_entry_bits;
        }
        return 0;
    }
};

enum class MessageKind : std::uint8_t {
    Adv,
    AdvRelay,
    Join,
    Schedule,
    Report,
    ConfirmRequest,
    MemberAck,
    ChAck,
    BsPacket,
    DirectBsPacket,
};
inline constexpr std::size_t kMessageKindCount = 10;

constexpr std::string_view to_string(MessageKind k) {
    constexpr std::array<std::string_view, kMessageKindCount> names = {
        "Adv", "AdvRelay", "Join", "Schedule", "Report", "ConfirmRequest", "MemberAck", "ChAck", "BsPacket", "DirectBsPacket"};
    return names[static_cast<std::size_t>(k)];
}

namespace detail {

constexpr std::uint32_t bit(Field f) { return 1u << static_cast<unsigned>(f); }

// Fields each message kind may carry, across all protocols.
constexpr std::array<std::uint32_t, kMessageKindCount> kSchema = {
    /*Adv*/ bit(Field::Control) | bit(Field::Ttl) | bit(Field::Timestamp) | bit(Field::Nonce),
    /*AdvRelay*/ bit(Field::Control) | bit(Field::Ttl) | bit(Field::Timestamp),
    /*Join*/ bit(Field::Control) | bit(Field::Ttl) | bit(Field::Timestamp) | bit(Field::KeyId) | bit(Field::Nonce) |
        bit(Field::Mac),
    /*Schedule*/ bit(Field::Control) | bit(Field::SlotEntry) | bit(Field::Mac),
    /*Report*/ bit(Field::Control) | bit(Field::Data) | bit(Field::FlagRT) | bit(Field::FlagPR) | bit(Field::Ttl) |
        bit(Field::KeyId) | bit(Field::Nonce) | bit(Field::Counter) | bit(Field::Mac),
    /*ConfirmRequest*/ bit(Field::Control) | bit(Field::SlotEntry) | bit(Field::Ttl) | bit(Field::FlagRT) |
        bit(Field::FlagPR) | bit(Field::FlagAT) | bit(Field::Mac),
    /*MemberAck*/ bit(Field::Control) | bit(Field::FlagACK) | bit(Field::KeyId) | bit(Field::Counter) | bit(Field::Mac),
    /*ChAck*/ bit(Field::Control) | bit(Field::FlagACK) | bit(Field::KeyId) | bit(Field::Mac),
    /*BsPacket*/ bit(Field::Control) | bit(Field::Data) | bit(Field::KeyId) | bit(Field::Counter) | bit(Field::Mac),
    /*DirectBsPacket*/ bit(Field::Control) | bit(Field::Data) | bit(Field::Counter) | bit(Field::Mac),
};

}  // namespace detail

/// A protocol message described by the fields it carries. Sizes are never
/// stored; they are always recomputed from the table.
struct Message {
    MessageKind kind = MessageKind::Adv;
    NodeId sender = 0;
    // kBaseStation for BS-bound packets; nullopt for broadcasts.
    std::optional<NodeId> recipient;
    std::array<std::uint16_t, kFieldCount> fields{};

    Message& with(Field f, std::uint16_t count = 1) {
        fields[static_cast<std::size_t>(f)] += count;
        return *this;
    }
    std::uint16_t count(Field f) const { return fields[static_cast<std::size_t>(f)]; }
    bool has_security_fields() const {
        return count(Field::KeyId) + count(Field::Nonce) + count(Field::Counter) + count(Field::Mac) > 0;
    }
};

inline void validate_schema(const Message& m) {
    const std::uint32_t allowed = detail::kSchema[static_cast<std::size_t>(m.kind)];
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        const auto f = static_cast<Field>(i);
        if (m.fields[i] == 0) continue;
        if (!(allowed & detail::bit(f)))
            throw std::invalid_argument("size_of: field " + std::to_string(i) + " not allowed in " +
                                        std::string(to_string(m.kind)));
        if (f != Field::SlotEntry && m.fields[i] > 1)
            throw std::invalid_argument("size_of: field " + std::to_string(i) + " repeated in " +
                                        std::string(to_string(m.kind)));
    }
}

struct BitBreakdown {
    std::uint64_t control = 0;
    std::uint64_t data = 0;
    std::uint64_t security = 0;
    std::uint64_t total() const { return control + data + security; }
};

inline BitBreakdown breakdown(const SizeTable& table, const Message& m) {
    validate_schema(m);
    BitBreakdown b;
    for (std::size_t i = 0; i < kFieldCount; ++i) {
        const auto f = static_cast<Field>(i);
        const std::uint64_t bits = static_cast<std::uint64_t>(table.width(f)) * m.fields[i];
        switch (bit_class(f)) {
            case BitClass::Control: b.control += bits; break;
            case BitClass::Data: b.data += bits; break;
            case BitClass::Security: b.security += bits; break;
        }
    }
    return b;
}

inline std::uint64_t size_of(const SizeTable& table, const Message& m) { return breakdown(table, m).total(); }

/// Field layout of every message each protocol sends. `slots` is the number
/// of (member, slot) entries for Schedule / ConfirmRequest.
inline Message compose(Protocol protocol, MessageKind kind, std::size_t slots = 0) {
    Message m;
    m.kind = kind;
    m.with(Field::Control);
    const bool secure = is_secure(protocol);
    using K = MessageKind;

    if (!is_mod(protocol)) {
        const bool tcca = protocol == Protocol::Tcca;
        switch (kind) {
            case K::Adv:
                if (tcca) m.with(Field::Ttl).with(Field::Timestamp);
                if (secure) m.with(Field::Nonce);
                break;
            case K::AdvRelay:
                if (!tcca) throw std::invalid_argument("compose: AdvRelay is TCCA-only");
                m.with(Field::Ttl).with(Field::Timestamp);
                break;
            case K::Join:
                if (tcca) m.with(Field::Timestamp).with(Field::Ttl);
                if (secure) m.with(Field::KeyId).with(Field::Nonce).with(Field::Mac);
                break;
            case K::Schedule:
                m.with(Field::SlotEntry, static_cast<std::uint16_t>(slots));
                if (secure) m.with(Field::Mac);
                break;
            case K::Report:
                m.with(Field::Data);
                if (secure) m.with(Field::Nonce).with(Field::Mac);
                break;
            case K::BsPacket:
            case K::DirectBsPacket:
                m.with(Field::Data);
                if (secure) m.with(Field::Counter).with(Field::Mac);
                break;
            default: throw std::invalid_argument("compose: " + std::string(to_string(kind)) + " not used by " +
                                                 std::string(to_string(protocol)));
        }
        return m;
    }

    switch (kind) {
        case K::Report:
            // Full-round broadcast form: RT, TTL, PR.
            m.with(Field::Data).with(Field::FlagRT).with(Field::Ttl).with(Field::FlagPR);
            if (secure) m.with(Field::KeyId).with(Field::Counter).with(Field::Mac);
            break;
        case K::ConfirmRequest:
            m.with(Field::SlotEntry, static_cast<std::uint16_t>(slots))
                .with(Field::Ttl)
                .with(Field::FlagRT)
                .with(Field::FlagPR)
                .with(Field::FlagAT);
            if (secure) m.with(Field::Mac);
            break;
        case K::MemberAck:
            m.with(Field::FlagACK);
            if (secure) m.with(Field::KeyId).with(Field::Counter).with(Field::Mac);
            break;
        case K::ChAck:
            m.with(Field::FlagACK);
            if (secure) m.with(Field::KeyId).with(Field::Mac);
            break;
        case K::BsPacket:
            m.with(Field::Data);
            if (secure) m.with(Field::KeyId).with(Field::Counter).with(Field::Mac);
            break;
        case K::DirectBsPacket:
            m.with(Field::Data);
            if (secure) m.with(Field::Counter).with(Field::Mac);
            break;
        default: throw std::invalid_argument("compose: " + std::string(to_string(kind)) + " not used by " +
                                             std::string(to_string(protocol)));
    }
    return m;
}

/// Mod-LEACH half-round report: unicast to the remembered CH, PR + TTL.
inline Message compose_half_round_report(Protocol protocol) {
    if (!is_mod(protocol)) throw std::invalid_argument("compose: half-round reports are Mod-only");
    Message m;
    m.kind = MessageKind::Report;
    m.with(Field::Control).with(Field::Data).with(Field::FlagPR).with(Field::Ttl);
    if (is_secure(protocol)) m.with(Field::KeyId).with(Field::Counter).with(Field::Mac);
    return m;
}

}  // namespace wsnsim
