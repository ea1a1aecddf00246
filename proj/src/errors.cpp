#include "akap/errors.hpp"

namespace akap {

std::string_view to_string(ProtocolErrc code) noexcept {
    switch (code) {
        case ProtocolErrc::stale_timestamp: return "stale-timestamp";
        case ProtocolErrc::unknown_hid: return "unknown-hid";
        case ProtocolErrc::no_route: return "no-route";
        case ProtocolErrc::no_session: return "no-session";
        case ProtocolErrc::authenticator_mismatch: return "authenticator-mismatch";
        case ProtocolErrc::local_auth_failed: return "local-auth-failed";
        case ProtocolErrc::gateway_auth_failed: return "gateway-auth-failed";
        case ProtocolErrc::sensor_auth_failed: return "sensor-auth-failed";
        case ProtocolErrc::registration_rejected: return "registration-rejected";
        case ProtocolErrc::decryption_failed: return "decryption-failed";
    }
    return "unknown";
}

}  // namespace akap

namespace akap {

std::string_view to_string(FormatErrc code) noexcept {
    switch (code) {
        case FormatErrc::io: return "io";
        case FormatErrc::malformed_json: return "malformed-json";
        case FormatErrc::malformed_hex: return "malformed-hex";
        case FormatErrc::bad_length: return "bad-length";
        case FormatErrc::unknown_version: return "unknown-version";
        case FormatErrc::wrong_kind: return "wrong-kind";
        case FormatErrc::invariant: return "invariant";
    }
    return "unknown";
}

}  // namespace akap
