#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace akap {

enum class ProtocolErrc {
    stale_timestamp,
    unknown_hid,
    no_route,
    no_session,
    authenticator_mismatch,
    local_auth_failed,
    gateway_auth_failed,
    sensor_auth_failed,
    registration_rejected,
    decryption_failed,
};

[[nodiscard]] std::string_view to_string(ProtocolErrc code) noexcept;

// A party refused a message or a registration. `check()` names the failed
// check the way an operator would read it, e.g. "X_GS mismatch at sensor".
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ProtocolErrc code, std::string check)
        : std::runtime_error(check), code_(code), check_(std::move(check)) {}

    [[nodiscard]] ProtocolErrc code() const noexcept { return code_; }
    [[nodiscard]] const std::string& check() const noexcept { return check_; }

private:
    ProtocolErrc code_;
    std::string check_;
};

// A frame that does not parse under the wire format.
class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace akap

namespace akap {

enum class FormatErrc {
    io,
    malformed_json,
    malformed_hex,
    bad_length,
    unknown_version,
    wrong_kind,
    invariant,
};

[[nodiscard]] std::string_view to_string(FormatErrc code) noexcept;

// Failure to read or write one of the JSON artifacts (state files, transcripts, reports).
class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] FormatErrc code() const noexcept { return code_; }

private:
    FormatErrc code_;
};

}  // namespace akap
