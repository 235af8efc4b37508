// 256-bit digests over byte strings. Used for content keys, canonical
// landscape digests and snapshot integrity checks.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace mmm {

struct Digest256 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest256&) const = default;

    std::string hex() const;
    static Digest256 fromHex(std::string_view hex); // throws Malformed
};

Digest256 sha256(std::string_view data);

} // namespace mmm
