#include "akap/protocol.hpp"

namespace akap {

namespace {

constexpr std::string_view kPasswordTag = "PWB";
constexpr std::string_view kSidTag = "SID";

using Be64 = std::array<std::uint8_t, 8>;

Be64 ts(Timestamp t) { return encode_be64(t.ticks); }

ByteView view(const Be64& a) { return {a.data(), a.size()}; }

[[noreturn]] void fail(ProtocolErrc code, std::string check) { throw ProtocolError(code, std::move(check)); }

void validate(const UserCredentials& cred) {
    if (cred.id.empty()) throw std::invalid_argument("user identity must be nonempty");
    if (cred.pw.empty()) throw std::invalid_argument("password must be nonempty");
}

}  // namespace

Block derive_sk(const Hash& h, const Block& r_u, const Block& r_g, const Block& r_s) {
    return h({r_u.view(), r_g.view(), r_s.view()});
}

Block password_block(const Hash& h, std::string_view pw) { return h.canon_block(kPasswordTag, as_bytes(pw)); }

Block sid_block(const Hash& h, std::string_view sid) { return h.canon_block(kSidTag, as_bytes(sid)); }

void check_fresh(const ProtocolConfig& cfg, Timestamp t, Timestamp now, std::string_view check) {
    const std::uint64_t age = now.ticks >= t.ticks ? now.ticks - t.ticks : t.ticks - now.ticks;
    if (age > cfg.delta) fail(ProtocolErrc::stale_timestamp, std::string(check));
}

UserRegistrationStart user_register_request(const ProtocolConfig& cfg, const UserCredentials& cred,
                                            SeededRng& rng) {
    validate(cred);
    const Hash& h = cfg.hash;
    PendingUserRegistration p;
    p.r1 = rng.next_block();
    const FuzzyOutput fz = gen_fuzzy(cred.bio, rng);
    p.sigma = fz.sigma;
    p.tau = fz.tau;
    p.hid = h({as_bytes(cred.id), p.r1.view()});
    const Block hpw = h({as_bytes(cred.pw), p.sigma.view()});
    p.n = password_block(h, cred.pw) ^ h({as_bytes(cred.id), p.sigma.view()});
    return {UserRegRequest{p.hid, hpw, p.n}, p};
}

UserRegResponse gateway_register_user(const ProtocolConfig& cfg, GatewayState& gw, const UserRegRequest& req) {
    if (gw.user_table.contains(req.hid)) fail(ProtocolErrc::registration_rejected, "HID already registered");
    const Hash& h = cfg.hash;
    const Block d1 = h({req.hid.view(), req.n.view()});
    const Block d2 = h({d1.view(), gw.gj.view()}) ^ req.hpw;
    const Block d3 = d2 ^ req.n;
    const Block d4 = h({req.hid.view(), gw.gj.view()}) ^ d1;
    gw.user_table.emplace(req.hid, d1);
    return {d1, d3, d4};
}

SmartCardStore user_finalize_registration(const ProtocolConfig& cfg, const PendingUserRegistration& pending,
                                          const UserRegResponse& resp) {
    SmartCardStore card;
    card.d1 = resp.d1;
    card.d3 = resp.d3;
    card.d4 = resp.d4;
    card.omega = pending.n ^ pending.r1;
    card.m = cfg.hash({pending.n.view(), pending.r1.view()}) ^ pending.hid;
    card.tau = pending.tau;
    return card;
}

SensorRegResponse gateway_register_sensor(const ProtocolConfig& cfg, GatewayState& gw, const SensorRegRequest& req,
                                          SeededRng& rng) {
    if (req.sid.empty()) throw std::invalid_argument("sensor identity must be nonempty");
    if (gw.sensor_table.contains(req.sid)) fail(ProtocolErrc::registration_rejected, "SID already registered");
    const Hash& h = cfg.hash;
    const Block b = rng.next_block();
    const Block pid = h({as_bytes(req.sid), b.view()});
    const Block hsid = h({as_bytes(req.sid), gw.gj.view()});
    const Block sg = h({hsid.view(), gw.gj.view()}) ^ pid;
    Bytes l = pke_encrypt(req.public_key, pid.view());
    gw.sensor_table.emplace(req.sid, pid);
    return {sg, std::move(l)};
}

SensorState sensor_finalize_registration(const std::string& sid, const PkeKeyPair& keys,
                                         const SensorRegResponse& resp) {
    Bytes pid;
    try {
        pid = pke_decrypt(keys.private_key, resp.l);
    } catch (const DecryptionError& e) {
        fail(ProtocolErrc::decryption_failed, std::string("L decryption failed at sensor: ") + e.what());
    }
    if (pid.size() != Block::size) fail(ProtocolErrc::decryption_failed, "L does not decrypt to a PID block");
    return SensorState{sid, resp.sg, resp.l, Block::from(pid), keys};
}

void gateway_add_route(GatewayState& gw, const Block& hid, const std::string& sid) {
    if (!gw.user_table.contains(hid)) fail(ProtocolErrc::unknown_hid, "route for unregistered HID");
    if (!gw.sensor_table.contains(sid)) fail(ProtocolErrc::no_route, "route to unregistered SID " + sid);
    gw.routing[hid] = sid;
}

UserLoginResult user_login(const ProtocolConfig& cfg, const UserCredentials& cred, const SmartCardStore& card,
                           SeededRng& rng, Timestamp now) {
    validate(cred);
    const Hash& h = cfg.hash;
    const Sigma sigma = rep_fuzzy(cred.bio, card.tau);
    const Block n = password_block(h, cred.pw) ^ h({as_bytes(cred.id), sigma.view()});
    const Block r1 = card.omega ^ n;
    const Block hid = h({as_bytes(cred.id), r1.view()});
    const Block m_prime = h({n.view(), r1.view()}) ^ hid;
    if (m_prime != card.m) fail(ProtocolErrc::local_auth_failed, "M check failed at smart card");

    const Block hpw = h({as_bytes(cred.pw), sigma.view()});
    const Block b1 = card.d3 ^ n ^ hpw;
    const Block r_u = rng.next_block();
    const Block b2 = b1 ^ r_u;
    const auto t1 = ts(now);
    const Block x_ug = h({view(t1), r_u.view(), hid.view(), b2.view()});
    return {M1{hid, b2, x_ug, now}, UserSessionState{r_u, b1, card.d1, hid, n, now}};
}

GatewayM1Result gateway_process_m1(const ProtocolConfig& cfg, const GatewayState& gw, const M1& m1,
                                   SeededRng& rng, Timestamp now) {
    check_fresh(cfg, m1.t1, now, "T1 freshness at gateway");
    const auto user = gw.user_table.find(m1.hid);
    if (user == gw.user_table.end()) fail(ProtocolErrc::unknown_hid, "unknown HID at gateway");
    const auto route = gw.routing.find(m1.hid);
    if (route == gw.routing.end()) fail(ProtocolErrc::no_route, "no sensor route for HID at gateway");
    const auto sensor = gw.sensor_table.find(route->second);
    if (sensor == gw.sensor_table.end()) fail(ProtocolErrc::no_route, "routed SID not registered at gateway");

    const Hash& h = cfg.hash;
    const Block& d1 = user->second;
    const std::string& sid = route->second;
    const Block& pid = sensor->second;

    const Block b1 = h({d1.view(), gw.gj.view()});
    const Block r_u = b1 ^ m1.b2;
    const auto t1 = ts(m1.t1);
    const Block x_ug = h({view(t1), r_u.view(), m1.hid.view(), m1.b2.view()});
    if (x_ug != m1.x_ug) fail(ProtocolErrc::authenticator_mismatch, "X_UG mismatch at gateway");

    const Block r_g = rng.next_block();
    const Block hsid = h({as_bytes(sid), gw.gj.view()});
    const Block sensor_mask = h({hsid.view(), gw.gj.view()});
    const Block b3 = r_u ^ sensor_mask;
    const Block b4 = d1 ^ h({b3.view(), as_bytes(sid), r_u.view()});
    const Block b5 = r_g ^ h({d1.view(), r_u.view()});
    const Block b6 = b3 ^ pid;
    const auto t2 = ts(now);
    const Block x_gs = cfg.quirk_double_rg
                           ? h({view(t2), r_u.view(), r_g.view(), r_g.view(), as_bytes(sid), b5.view()})
                           : h({view(t2), r_u.view(), r_g.view(), as_bytes(sid), b5.view()});
    return {M2{b4, b5, b6, x_gs, now}, GatewaySessionState{r_u, r_g, d1, m1.hid, b1, b5, sid, now}};
}

SensorM2Result sensor_process_m2(const ProtocolConfig& cfg, const SensorState& sn, const M2& m2, SeededRng& rng,
                                 Timestamp now) {
    check_fresh(cfg, m2.t2, now, "T2 freshness at sensor");
    const Hash& h = cfg.hash;
    const Block b3 = m2.b6 ^ sn.pid;
    // SG xor PID = h(HSID || G_j), the mask the gateway put on r_u.
    const Block r_u = b3 ^ (sn.sg ^ sn.pid);
    const Block d1 = m2.b4 ^ h({b3.view(), as_bytes(sn.sid), r_u.view()});
    const Block r_g = m2.b5 ^ h({d1.view(), r_u.view()});
    const auto t2 = ts(m2.t2);
    const Block x_gs = h({view(t2), r_u.view(), r_g.view(), as_bytes(sn.sid), m2.b5.view()});
    if (x_gs != m2.x_gs) fail(ProtocolErrc::authenticator_mismatch, "X_GS mismatch at sensor");

    const Block r_s = rng.next_block();
    const Block b7 = r_s ^ h({sn.sg.view(), d1.view(), r_g.view()});
    const Block b8 = sn.pid ^ b7;
    const Block sk = derive_sk(h, r_u, r_g, r_s);
    const auto t3 = ts(now);
    const Block x_sg = h({view(t3), r_g.view(), r_s.view(), b7.view(), sn.sg.view()});
    const Block sidb = sid_block(h, sn.sid);
    const Block x_su = h({r_u.view(), r_s.view(), sidb.view(), d1.view()});
    return {M3{b8, x_sg, x_su, now}, sk, r_s, r_u, r_g};
}

GatewayM3Result gateway_process_m3(const ProtocolConfig& cfg, const GatewayState& gw,
                                   const GatewaySessionState& session, const M3& m3, Timestamp now) {
    check_fresh(cfg, m3.t3, now, "T3 freshness at gateway");
    const auto sensor = gw.sensor_table.find(session.sid);
    if (sensor == gw.sensor_table.end()) fail(ProtocolErrc::no_route, "session SID not registered at gateway");
    const Hash& h = cfg.hash;
    const Block& pid = sensor->second;

    const Block b7 = m3.b8 ^ pid;
    const Block hsid = h({as_bytes(session.sid), gw.gj.view()});
    const Block sg = h({hsid.view(), gw.gj.view()}) ^ pid;
    const Block r_s = b7 ^ h({sg.view(), session.d1.view(), session.r_g.view()});
    const auto t3 = ts(m3.t3);
    const Block x_sg = h({view(t3), session.r_g.view(), r_s.view(), b7.view(), sg.view()});
    if (x_sg != m3.x_sg) fail(ProtocolErrc::authenticator_mismatch, "X_SG mismatch at gateway");

    const Block sk = derive_sk(h, session.r_u, session.r_g, r_s);
    const Block b9 = session.d1 ^ session.b1;
    const Block b10 = b9 ^ h({session.hid.view(), gw.gj.view()}) ^ r_s;
    const Block b11 = sid_block(h, session.sid) ^ h({session.b1.view(), r_s.view()});
    const auto t4 = ts(now);
    const Block x_gu = h({view(t4), session.r_u.view(), session.r_g.view(), b10.view()});
    return {M4{session.b5, b10, b11, x_gu, m3.x_su, now}, sk};
}

UserM4Result user_process_m4(const ProtocolConfig& cfg, const UserSessionState& session,
                             const SmartCardStore& card, const M4& m4, Timestamp now) {
    check_fresh(cfg, m4.t4, now, "T4 freshness at user");
    const Hash& h = cfg.hash;
    const Block r_s = session.b1 ^ m4.b10 ^ card.d4;
    const Block r_g = m4.b5 ^ h({session.d1.view(), session.r_u.view()});
    const Block sk = derive_sk(h, session.r_u, r_g, r_s);
    const auto t4 = ts(m4.t4);
    const Block x_gu = h({view(t4), session.r_u.view(), r_g.view(), m4.b10.view()});
    if (x_gu != m4.x_gu) fail(ProtocolErrc::gateway_auth_failed, "X_GU mismatch at user");
    const Block sidb = m4.b11 ^ h({session.b1.view(), r_s.view()});
    const Block x_su = h({session.r_u.view(), r_s.view(), sidb.view(), session.d1.view()});
    if (x_su != m4.x_su) fail(ProtocolErrc::sensor_auth_failed, "X_SU mismatch at user");
    return {sk, r_g, r_s};
}

}  // namespace akap
