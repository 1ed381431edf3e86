#include "relayguard/digest.hpp"

#include <openssl/sha.h>

#include "relayguard/errors.hpp"

namespace relayguard {

Digest sha256(std::span<const std::uint8_t> bytes) {
    Digest out{};
    SHA256(bytes.data(), bytes.size(), out.data());
    return out;
}

Digest sha256(std::string_view text) {
    return sha256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

const Digest& empty_digest() {
    static const Digest d = sha256(std::span<const std::uint8_t>{});
    return d;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<std::vector<std::uint8_t>> decode_hex(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
    }
    if (text.size() % 2 != 0) return std::nullopt;
    std::vector<std::uint8_t> out(text.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(text[2 * i]);
        int lo = nibble(text[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

std::optional<Digest> parse_digest(std::string_view text) {
    auto bytes = decode_hex(text);
    if (!bytes || bytes->size() != 32) return std::nullopt;
    Digest d{};
    std::copy(bytes->begin(), bytes->end(), d.begin());
    return d;
}

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::MalformedRow: return "MalformedRow";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::EmptyTrace: return "EmptyTrace";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::InvalidProfile: return "InvalidProfile";
        case Errc::StatsMismatch: return "StatsMismatch";
        case Errc::CorruptSnapshot: return "CorruptSnapshot";
        case Errc::InfeasibleDegree: return "InfeasibleDegree";
        case Errc::OriginOutOfRange: return "OriginOutOfRange";
        case Errc::LabelMismatch: return "LabelMismatch";
        case Errc::InvalidMix: return "InvalidMix";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::SinkUnwritable: return "SinkUnwritable";
    }
    return "Unknown";
}

}  // namespace relayguard
