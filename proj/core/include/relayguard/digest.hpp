#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relayguard {

/// SHA-256 digest of a calldata payload (or any other byte string).
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);

/// Digest of the empty byte string.
const Digest& empty_digest();

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Decodes an optionally 0x-prefixed hex string. Returns nullopt on odd
/// length or non-hex characters; accepts either case.
std::optional<std::vector<std::uint8_t>> decode_hex(std::string_view text);

/// Parses exactly 64 hex digits (optionally 0x-prefixed) into a Digest.
std::optional<Digest> parse_digest(std::string_view text);

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        // SHA-256 output is already uniform; the leading 8 bytes suffice.
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
        return static_cast<std::size_t>(v);
    }
};

}  // namespace relayguard
