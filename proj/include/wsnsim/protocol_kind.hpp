#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wsnsim {

enum class Protocol { Leach, Tcca, SecLeach, ModLeach, ModSecLeach };

inline constexpr std::array<Protocol, 5> kAllProtocols = {
    Protocol::Leach, Protocol::Tcca, Protocol::SecLeach, Protocol::ModLeach, Protocol::ModSecLeach};

constexpr std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::Leach: return "leach";
        case Protocol::Tcca: return "tcca";
        case Protocol::SecLeach: return "sec-leach";
        case Protocol::ModLeach: return "mod-leach";
        case Protocol::ModSecLeach: return "mod-sec-leach";
    }
    return "?";
}

inline std::optional<Protocol> parse_protocol(std::string_view name) {
    for (Protocol p : kAllProtocols)
        if (to_string(p) == name) return p;
    return std::nullopt;
}

constexpr bool is_secure(Protocol p) { return p == Protocol::SecLeach || p == Protocol::ModSecLeach; }
constexpr bool is_mod(Protocol p) { return p == Protocol::ModLeach || p == Protocol::ModSecLeach; }

}  // namespace wsnsim
