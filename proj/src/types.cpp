#include "hmacsim/types.hpp"

#include <cctype>
#include <stdexcept>

namespace hmacsim {

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower >= 'a' && lower <= 'f') return lower - 'a' + 10;
    return -1;
}

}  // namespace

MacAddress MacAddress::parse(std::string_view text) {
    if (text.size() != 17) {
        throw std::invalid_argument("malformed MAC address: " + std::string(text));
    }
    std::array<std::uint8_t, 6> octets{};
    for (std::size_t i = 0; i < 6; ++i) {
        const std::size_t pos = i * 3;
        const int hi = hex_value(text[pos]);
        const int lo = hex_value(text[pos + 1]);
        if (hi < 0 || lo < 0 || (i < 5 && text[pos + 2] != ':')) {
            throw std::invalid_argument("malformed MAC address: " + std::string(text));
        }
        octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return MacAddress(octets);
}

MacAddress MacAddress::for_node(NodeId id) {
    return MacAddress({0x02, 0x00, 0x00, 0x00, static_cast<std::uint8_t>((id.value >> 8) & 0xff),
                       static_cast<std::uint8_t>(id.value & 0xff)});
}

std::string MacAddress::to_string() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(17);
    for (std::size_t i = 0; i < octets_.size(); ++i) {
        if (i > 0) out.push_back(':');
        out.push_back(kDigits[octets_[i] >> 4]);
        out.push_back(kDigits[octets_[i] & 0x0f]);
    }
    return out;
}

}  // namespace hmacsim
