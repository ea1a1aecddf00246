#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "akap/bytes.hpp"
#include "akap/fuzzy.hpp"
#include "akap/hash.hpp"
#include "akap/messages.hpp"
#include "akap/pke.hpp"
#include "akap/rng.hpp"

namespace akap {

struct ProtocolConfig {
    Hash hash;
    // Freshness window: a timestamp T is valid at `now` iff |now - T| <= delta.
    std::uint64_t delta = 2;
    // Gateway hashes r_g twice into X_GS. The sensor hashes it once, so every
    // session then fails at the sensor; kept to study that mismatch.
    bool quirk_double_rg = false;
};

struct UserCredentials {
    std::string id;
    std::string pw;
    Biometric bio;
};

// Everything the user's device keeps after registration.
struct SmartCardStore {
    Block d1, d3, d4, omega, m;
    HelperData tau;
    friend bool operator==(const SmartCardStore&, const SmartCardStore&) = default;
};

struct GatewayState {
    Block gj;                                   // gateway private key G_j
    std::map<Block, Block> user_table;          // HID -> D1
    std::map<std::string, Block> sensor_table;  // SID -> PID
    std::map<Block, std::string> routing;       // HID -> SID (deployment config)
    friend bool operator==(const GatewayState&, const GatewayState&) = default;
};

struct SensorState {
    std::string sid;
    Block sg;
    Bytes l;
    Block pid;
    PkeKeyPair keys;
    friend bool operator==(const SensorState&, const SensorState&) = default;
};

struct PendingUserRegistration {
    Block r1, n, hid;
    Sigma sigma;
    HelperData tau;
};

struct UserRegistrationStart {
    UserRegRequest request;
    PendingUserRegistration pending;
};

struct UserSessionState {
    Block r_u, b1, d1, hid, n;
    Timestamp t1;
};

struct GatewaySessionState {
    Block r_u, r_g, d1, hid, b1, b5;
    std::string sid;
    Timestamp t2;
};

struct UserLoginResult {
    M1 m1;
    UserSessionState session;
};

struct GatewayM1Result {
    M2 m2;
    GatewaySessionState session;
};

struct SensorM2Result {
    M3 m3;
    Block sk;
    Block r_s;
    Block r_u;
    Block r_g;
};

struct GatewayM3Result {
    M4 m4;
    Block sk;
};

struct UserM4Result {
    Block sk;
    Block r_g;
    Block r_s;
};

// SK = h(r_u || r_g || r_s). The one definition every party and the KSSTI attack use.
[[nodiscard]] Block derive_sk(const Hash& h, const Block& r_u, const Block& r_g, const Block& r_s);

// PW as an XOR operand: canon_block("PWB", pw).
[[nodiscard]] Block password_block(const Hash& h, std::string_view pw);

// SID as an XOR operand: canon_block("SID", sid). Hashes take the raw identity.
[[nodiscard]] Block sid_block(const Hash& h, std::string_view sid);

// Throws ProtocolError(stale_timestamp) naming `check` when |now - t| > delta.
void check_fresh(const ProtocolConfig& cfg, Timestamp t, Timestamp now, std::string_view check);

// --- registration (secure channel) ---

[[nodiscard]] UserRegistrationStart user_register_request(const ProtocolConfig& cfg, const UserCredentials& cred,
                                                          SeededRng& rng);
// Rejects an HID already present; gw is untouched on error.
[[nodiscard]] UserRegResponse gateway_register_user(const ProtocolConfig& cfg, GatewayState& gw,
                                                    const UserRegRequest& req);
[[nodiscard]] SmartCardStore user_finalize_registration(const ProtocolConfig& cfg,
                                                        const PendingUserRegistration& pending,
                                                        const UserRegResponse& resp);

[[nodiscard]] SensorRegResponse gateway_register_sensor(const ProtocolConfig& cfg, GatewayState& gw,
                                                        const SensorRegRequest& req, SeededRng& rng);
[[nodiscard]] SensorState sensor_finalize_registration(const std::string& sid, const PkeKeyPair& keys,
                                                       const SensorRegResponse& resp);

// Routes a registered HID to a registered sensor.
void gateway_add_route(GatewayState& gw, const Block& hid, const std::string& sid);

// --- login and authentication (public channel) ---

[[nodiscard]] UserLoginResult user_login(const ProtocolConfig& cfg, const UserCredentials& cred,
                                         const SmartCardStore& card, SeededRng& rng, Timestamp now);
[[nodiscard]] GatewayM1Result gateway_process_m1(const ProtocolConfig& cfg, const GatewayState& gw, const M1& m1,
                                                 SeededRng& rng, Timestamp now);
[[nodiscard]] SensorM2Result sensor_process_m2(const ProtocolConfig& cfg, const SensorState& sn, const M2& m2,
                                               SeededRng& rng, Timestamp now);
[[nodiscard]] GatewayM3Result gateway_process_m3(const ProtocolConfig& cfg, const GatewayState& gw,
                                                 const GatewaySessionState& session, const M3& m3, Timestamp now);
[[nodiscard]] UserM4Result user_process_m4(const ProtocolConfig& cfg, const UserSessionState& session,
                                           const SmartCardStore& card, const M4& m4, Timestamp now);

}  // namespace akap
