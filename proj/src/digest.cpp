#include "mmm/digest.hpp"

#include <openssl/sha.h>

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

std::string Digest256::hex() const {
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xf]);
    }
    return out;
}

Digest256 Digest256::fromHex(std::string_view hex) {
    throwIf(hex.size() != 64, Errc::Malformed, "digest hex must be 64 chars");
    Digest256 d;
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = hexNibble(hex[2 * i]);
        int lo = hexNibble(hex[2 * i + 1]);
        throwIf(hi < 0 || lo < 0, Errc::Malformed, "digest hex has non-hex character");
        d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return d;
}

Digest256 sha256(std::string_view data) {
    Digest256 d;
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), d.bytes.data());
    return d;
}

} // namespace mmm
