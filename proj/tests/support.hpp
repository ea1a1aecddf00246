#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <random>
#include <string>

#include "akap/attacks.hpp"
#include "akap/storage.hpp"

namespace akap::test {

inline Block random_block(std::mt19937_64& g) {
    Block b;
    for (auto& x : b.bytes) x = static_cast<std::uint8_t>(g());
    return b;
}

template <std::size_t N>
FixedBytes<N> random_fixed(std::mt19937_64& g) {
    FixedBytes<N> b;
    for (auto& x : b.bytes) x = static_cast<std::uint8_t>(g());
    return b;
}

inline Bytes random_bytes(std::mt19937_64& g, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(g());
    return b;
}

inline Block block_hex(std::string_view hex) { return Block::from(from_hex(hex)); }

inline Timestamp random_ts(std::mt19937_64& g) { return Timestamp{1 + g() % 0xffffffffffffULL}; }

// Property generator covering every wire message kind.
inline WireMessage random_message(std::mt19937_64& g) {
    auto b = [&] { return random_block(g); };
    switch (g() % 8) {
        case 0: return M1{b(), b(), b(), random_ts(g)};
        case 1: return M2{b(), b(), b(), b(), random_ts(g)};
        case 2: return M3{b(), b(), b(), random_ts(g)};
        case 3: return M4{b(), b(), b(), b(), b(), random_ts(g)};
        case 4: return UserRegRequest{b(), b(), b()};
        case 5: return UserRegResponse{b(), b(), b()};
        case 6: {
            std::string sid(1 + g() % 40, 'x');
            for (auto& c : sid) c = static_cast<char>('!' + g() % 94);
            return SensorRegRequest{sid, random_bytes(g, 32)};
        }
        default: return SensorRegResponse{b(), random_bytes(g, 1 + g() % 112)};
    }
}

// Biometric reading used by the s0 golden scenario: byte i = 37*i + 11.
inline Biometric s0_bio() {
    Biometric bio;
    for (std::size_t i = 0; i < bio.bytes.size(); ++i) bio.bytes[i] = static_cast<std::uint8_t>((37 * i + 11) % 256);
    return bio;
}

inline Block s0_seed() {
    Block s;
    for (std::size_t i = 0; i < s.bytes.size(); ++i) s.bytes[i] = static_cast<std::uint8_t>(i);
    return s;
}

inline UserCredentials s0_user() { return {"alice", "correct horse", s0_bio()}; }
inline constexpr const char* kS0Sensor = "sn-01";

// Per-seed user with a biometric drawn from the seed itself.
inline UserCredentials user_for(std::uint64_t seed_index, std::string id = "u") {
    std::mt19937_64 g(seed_index * 0x9e3779b97f4a7c15ULL + 7);
    return {std::move(id), "pw-" + std::to_string(seed_index), random_fixed<80>(g)};
}

// Fresh world with one sensor and one routed user.
inline World registered_world(const Block& seed, const UserCredentials& user, std::uint64_t delta = 2,
                              const std::string& sid = "sensor-1") {
    World w(WorldConfig{seed, delta, "sha256", false});
    w.run_registration(user, sid);
    return w;
}

// Registration plus one session driven directly through the protocol
// operations, keeping every intermediate for identity checks.
struct OpRun {
    ProtocolConfig cfg;
    SeededRng rng;
    UserCredentials user;
    std::string sid = "sensor-1";
    GatewayState gw;
    PkeKeyPair sensor_keys;
    SensorState sensor;
    UserRegistrationStart reg;
    SmartCardStore card;
    UserLoginResult login;
    GatewayM1Result g1;
    SensorM2Result s2;
    GatewayM3Result g3;
    UserM4Result u4;

    OpRun(const Block& seed, UserCredentials cred) : rng(seed), user(std::move(cred)) {
        gw.gj = rng.next_block();
        sensor_keys = pke_keygen(rng);
        const auto sresp = gateway_register_sensor(cfg, gw, SensorRegRequest{sid, sensor_keys.public_key}, rng);
        sensor = sensor_finalize_registration(sid, sensor_keys, sresp);
        reg = user_register_request(cfg, user, rng);
        const auto uresp = gateway_register_user(cfg, gw, reg.request);
        gateway_add_route(gw, reg.request.hid, sid);
        card = user_finalize_registration(cfg, reg.pending, uresp);
    }

    void authenticate() {
        login = user_login(cfg, user, card, rng, Timestamp{5});
        g1 = gateway_process_m1(cfg, gw, login.m1, rng, Timestamp{6});
        s2 = sensor_process_m2(cfg, sensor, g1.m2, rng, Timestamp{7});
        g3 = gateway_process_m3(cfg, gw, g1.session, s2.m3, Timestamp{8});
        u4 = user_process_m4(cfg, login.session, card, g3.m4, Timestamp{9});
    }

    [[nodiscard]] Block hpw() const {
        return cfg.hash({as_bytes(user.pw), reg.pending.sigma.view()});
    }
};

}  // namespace akap::test
