#pragma once

// Shared helpers for the JSON artifacts. Internal to the library.

#include <json.hpp>

#include <string>
#include <string_view>

#include "akap/bytes.hpp"
#include "akap/errors.hpp"

namespace akap::detail {

using nlohmann::json;

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(FormatErrc::malformed_json, e.what());
    }
}

inline const json& member(const json& obj, std::string_view key) {
    if (!obj.is_object()) throw FormatError(FormatErrc::malformed_json, "expected JSON object");
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(FormatErrc::malformed_json, "missing field '" + std::string(key) + "'");
    return *it;
}

inline std::string string_field(const json& obj, std::string_view key) {
    const json& v = member(obj, key);
    if (!v.is_string()) throw FormatError(FormatErrc::malformed_json, "field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

inline std::uint64_t uint_field(const json& obj, std::string_view key) {
    const json& v = member(obj, key);
    if (!v.is_number_unsigned()) {
        throw FormatError(FormatErrc::malformed_json, "field '" + std::string(key) + "' must be an unsigned integer");
    }
    return v.get<std::uint64_t>();
}

inline Bytes hex_value(const json& v, std::string_view what) {
    if (!v.is_string()) throw FormatError(FormatErrc::malformed_hex, std::string(what) + " must be a hex string");
    try {
        return from_hex(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw FormatError(FormatErrc::malformed_hex, std::string(what) + ": " + e.what());
    }
}

template <std::size_t N>
FixedBytes<N> fixed_value(const json& v, std::string_view what) {
    Bytes raw = hex_value(v, what);
    if (raw.size() != N) {
        throw FormatError(FormatErrc::bad_length, std::string(what) + ": expected " + std::to_string(N) +
                                                      " bytes, got " + std::to_string(raw.size()));
    }
    return FixedBytes<N>::from(raw);
}

inline Block block_field(const json& obj, std::string_view key) { return fixed_value<32>(member(obj, key), key); }

// Checks the {"fmt": ..., "v": 1} header.
inline void check_header(const json& doc, std::string_view fmt) {
    if (string_field(doc, "fmt") != fmt) {
        throw FormatError(FormatErrc::wrong_kind, "expected fmt '" + std::string(fmt) + "'");
    }
    if (uint_field(doc, "v") != 1) throw FormatError(FormatErrc::unknown_version, "unsupported version");
}

}  // namespace akap::detail
