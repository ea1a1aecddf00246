#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace akap {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Fixed-size byte string. Block, Sigma and HelperData are all instances.
template <std::size_t N>
struct FixedBytes {
    static constexpr std::size_t size = N;

    std::array<std::uint8_t, N> bytes{};

    [[nodiscard]] ByteView view() const noexcept { return {bytes.data(), N}; }
    [[nodiscard]] bool is_zero() const noexcept {
        for (auto b : bytes) {
            if (b != 0) return false;
        }
        return true;
    }

    // Throws std::invalid_argument unless raw.size() == N.
    static FixedBytes from(ByteView raw);

    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

using Block = FixedBytes<32>;       // digest-sized XOR/hash operand
using Sigma = FixedBytes<16>;       // biometric key
using HelperData = FixedBytes<80>;  // code-offset helper string
using Biometric = FixedBytes<80>;   // 640-bit reading

[[nodiscard]] Block xor_blocks(const Block& a, const Block& b) noexcept;

inline Block operator^(const Block& a, const Block& b) noexcept { return xor_blocks(a, b); }

[[nodiscard]] std::string to_hex(ByteView data);
// Lowercase or uppercase hex, even length; throws std::invalid_argument otherwise.
[[nodiscard]] Bytes from_hex(std::string_view hex);

template <std::size_t N>
[[nodiscard]] std::string to_hex(const FixedBytes<N>& v) {
    return to_hex(v.view());
}

[[nodiscard]] inline ByteView as_bytes(std::string_view s) noexcept {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Timestamps are logical clock ticks, encoded as 8-byte big-endian.
struct Timestamp {
    std::uint64_t ticks{0};
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

[[nodiscard]] std::array<std::uint8_t, 8> encode_be64(std::uint64_t v) noexcept;
[[nodiscard]] std::uint64_t decode_be64(ByteView b);

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::from(ByteView raw) {
    if (raw.size() != N) {
        throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                    std::to_string(raw.size()));
    }
    FixedBytes<N> out;
    for (std::size_t i = 0; i < N; ++i) out.bytes[i] = raw[i];
    return out;
}

}  // namespace akap
