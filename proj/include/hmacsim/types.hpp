#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace hmacsim {

// Simulation time base: integer microseconds.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

struct NodeId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

// 48-bit IEEE MAC address, used as the link identifier in access policies.
class MacAddress {
public:
    constexpr MacAddress() = default;
    constexpr explicit MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

    // Accepts "aa:bb:cc:dd:ee:ff" (case-insensitive). Throws std::invalid_argument.
    static MacAddress parse(std::string_view text);

    // Locally administered address derived from a node index: 02:00:00:00:hi:lo.
    static MacAddress for_node(NodeId id);

    std::string to_string() const;
    const std::array<std::uint8_t, 6>& octets() const { return octets_; }

    friend auto operator<=>(const MacAddress&, const MacAddress&) = default;

private:
    std::array<std::uint8_t, 6> octets_{};
};

}  // namespace hmacsim

template <>
struct std::hash<hmacsim::NodeId> {
    std::size_t operator()(hmacsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
