#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "akap/bytes.hpp"
#include "akap/errors.hpp"

namespace akap {

// Public-channel authentication messages, fields in wire order.
struct M1 {
    Block hid, b2, x_ug;
    Timestamp t1;
    friend bool operator==(const M1&, const M1&) = default;
};

struct M2 {
    Block b4, b5, b6, x_gs;
    Timestamp t2;
    friend bool operator==(const M2&, const M2&) = default;
};

struct M3 {
    Block b8, x_sg, x_su;
    Timestamp t3;
    friend bool operator==(const M3&, const M3&) = default;
};

struct M4 {
    Block b5, b10, b11, x_gu, x_su;
    Timestamp t4;
    friend bool operator==(const M4&, const M4&) = default;
};

// Secure-channel registration messages.
struct UserRegRequest {
    Block hid, hpw, n;
    friend bool operator==(const UserRegRequest&, const UserRegRequest&) = default;
};

struct UserRegResponse {
    Block d1, d3, d4;
    friend bool operator==(const UserRegResponse&, const UserRegResponse&) = default;
};

// The sensor hands over its public key with its identity; the gateway needs
// it to produce L = ENC_pbs(PID).
struct SensorRegRequest {
    std::string sid;
    Bytes public_key;
    friend bool operator==(const SensorRegRequest&, const SensorRegRequest&) = default;
};

struct SensorRegResponse {
    Block sg;
    Bytes l;
    friend bool operator==(const SensorRegResponse&, const SensorRegResponse&) = default;
};

using WireMessage =
    std::variant<M1, M2, M3, M4, UserRegRequest, UserRegResponse, SensorRegRequest, SensorRegResponse>;

enum class MessageKind : std::uint8_t {
    m1 = 0x01,
    m2 = 0x02,
    m3 = 0x03,
    m4 = 0x04,
    user_reg_request = 0x10,
    user_reg_response = 0x11,
    sensor_reg_request = 0x12,
    sensor_reg_response = 0x13,
};

[[nodiscard]] MessageKind kind_of(const WireMessage& msg) noexcept;
[[nodiscard]] std::string_view to_string(MessageKind kind) noexcept;
// Accepts "M1".."M4" and the registration names printed by to_string.
[[nodiscard]] std::optional<MessageKind> parse_message_kind(std::string_view name) noexcept;

[[nodiscard]] Bytes encode(const WireMessage& msg);
// Throws WireError on unknown tags, wrong lengths, trailing bytes, zero timestamps.
[[nodiscard]] WireMessage decode(ByteView frame);

// Location of a Block field inside an encoded M1..M4 frame (offset counts the tag byte).
struct FieldLayout {
    std::string_view name;
    std::size_t offset;
    std::size_t length;
};

// Block fields of an authentication message, in wire order. Empty for registration kinds.
[[nodiscard]] std::vector<FieldLayout> block_fields(MessageKind kind);
[[nodiscard]] std::optional<FieldLayout> find_field(MessageKind kind, std::string_view field);

}  // namespace akap
