#include "mmm/ids.hpp"

#include <chrono>

#include "mmm/error.hpp"

namespace mmm {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hexNibble(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

} // namespace

std::string LandmarkId::hex() const {
    std::string out;
    out.reserve(32);
    for (auto b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xf]);
    }
    return out;
}

LandmarkId LandmarkId::fromHex(std::string_view hex) {
    throwIf(hex.size() != 32, Errc::Malformed, "landmark id must be 32 hex chars");
    LandmarkId id;
    for (std::size_t i = 0; i < 16; ++i) {
        int hi = hexNibble(hex[2 * i]);
        int lo = hexNibble(hex[2 * i + 1]);
        throwIf(hi < 0 || lo < 0, Errc::Malformed, "landmark id has non-hex character");
        id.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return id;
}

IdGenerator::IdGenerator() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(),
                      static_cast<unsigned>(std::chrono::steady_clock::now().time_since_epoch().count())};
    rng_.seed(seq);
}

LandmarkId IdGenerator::next(std::int64_t nowMillis) {
    LandmarkId id;
    // 48-bit millisecond prefix, big-endian so byte order matches time order.
    for (int i = 0; i < 6; ++i)
        id.bytes[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((nowMillis >> (8 * (5 - i))) & 0xff);
    // 80 pseudorandom bits. Raw engine words, not distributions, so the
    // stream is identical across standard libraries.
    std::uint64_t a = rng_();
    std::uint64_t b = rng_();
    for (int i = 0; i < 8; ++i)
        id.bytes[static_cast<std::size_t>(6 + i)] = static_cast<std::uint8_t>((a >> (8 * i)) & 0xff);
    id.bytes[14] = static_cast<std::uint8_t>(b & 0xff);
    id.bytes[15] = static_cast<std::uint8_t>((b >> 8) & 0xff);
    // The all-zero id is the pit's; nudge the vanishingly unlikely collision.
    if (id.isPit())
        id.bytes[15] = 1;
    return id;
}

ContentKey makeContentKey(std::string_view label, std::string_view typeName) {
    std::string material;
    material.reserve(label.size() + 1 + typeName.size());
    material.append(label);
    material.push_back('\0');
    material.append(typeName);
    return ContentKey{sha256(material)};
}

} // namespace mmm
