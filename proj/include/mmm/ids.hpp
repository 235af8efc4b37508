// Landmark identifiers: 128-bit values laid out as 48 bits of creation-epoch
// milliseconds followed by 80 pseudorandom bits. Byte-lexicographic comparison
// gives the total order; the all-zero id is reserved for the pit.
#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "mmm/digest.hpp"

namespace mmm {

struct LandmarkId {
    std::array<std::uint8_t, 16> bytes{};

    auto operator<=>(const LandmarkId&) const = default;

    bool isPit() const {
        for (auto b : bytes)
            if (b)
                return false;
        return true;
    }

    std::int64_t creationMillis() const {
        std::int64_t ms = 0;
        for (int i = 0; i < 6; ++i)
            ms = (ms << 8) | bytes[static_cast<std::size_t>(i)];
        return ms;
    }

    std::string hex() const;                          // 32 lowercase hex chars
    static LandmarkId fromHex(std::string_view hex);  // throws Malformed
    static LandmarkId pit() { return LandmarkId{}; }
};

// Deterministic id factory. Seeded generators (used by the simulation
// harness and the test suite) produce reproducible id streams; the CLI
// seeds from the system entropy source.
class IdGenerator {
public:
    explicit IdGenerator(std::uint64_t seed) : rng_(seed) {}
    IdGenerator(); // entropy-seeded

    LandmarkId next(std::int64_t nowMillis);

private:
    std::mt19937_64 rng_;
};

// Duplicate-candidate lookup key: hash of (label bytes ‖ 0x00 ‖ concrete-type
// name bytes). Equal label+type means equal key. Never used as identity.
struct ContentKey {
    Digest256 digest;

    auto operator<=>(const ContentKey&) const = default;

    std::string hex() const { return digest.hex(); }
};

ContentKey makeContentKey(std::string_view label, std::string_view typeName);

} // namespace mmm
