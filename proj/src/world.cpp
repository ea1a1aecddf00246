#include <algorithm>

#include "akap/netsim.hpp"

namespace akap {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::rejected_stale: return "rejected-stale";
        case Verdict::rejected_authenticator: return "rejected-authenticator";
        case Verdict::rejected_unknown: return "rejected-unknown";
        case Verdict::rejected_local: return "rejected-local";
        case Verdict::decode_error: return "decode-error";
        case Verdict::no_response: return "no-response";
    }
    return "unknown";
}

Verdict verdict_for(ProtocolErrc code) noexcept {
    switch (code) {
        case ProtocolErrc::stale_timestamp: return Verdict::rejected_stale;
        case ProtocolErrc::authenticator_mismatch:
        case ProtocolErrc::gateway_auth_failed:
        case ProtocolErrc::sensor_auth_failed: return Verdict::rejected_authenticator;
        case ProtocolErrc::local_auth_failed: return Verdict::rejected_local;
        default: return Verdict::rejected_unknown;
    }
}

namespace {

ProtocolConfig make_protocol(const WorldConfig& cfg) {
    if (cfg.delta == 0) throw std::invalid_argument("freshness window delta must be >= 1");
    return ProtocolConfig{Hash(cfg.hash), cfg.delta, cfg.quirk_double_rg};
}

// Decodes a frame expected to carry T; sets `err` and returns nullopt otherwise.
template <class T>
std::optional<T> expect(const Bytes& frame, std::string& err) {
    try {
        WireMessage msg = decode(frame);
        if (auto* m = std::get_if<T>(&msg)) return *m;
        err = "unexpected " + std::string(to_string(kind_of(msg)));
    } catch (const WireError& e) {
        err = e.what();
    }
    return std::nullopt;
}

}  // namespace

World::World(WorldConfig config)
    : config_(std::move(config)), protocol_(make_protocol(config_)), rng_(config_.seed) {
    gateway_.gj = rng_.next_block();
}

const SensorState& World::sensor(const std::string& sid) const {
    auto it = sensors_.find(sid);
    if (it == sensors_.end()) throw std::invalid_argument("no sensor '" + sid + "' in world");
    return it->second;
}

const SmartCardStore& World::card(const std::string& user_id) const {
    auto it = users_.find(user_id);
    if (it == users_.end()) throw std::invalid_argument("no user '" + user_id + "' in world");
    return it->second.card;
}

const TranscriptEntry& World::send(Channel channel, std::string sender, std::string receiver, Bytes payload) {
    ++clock_;
    return transcript_.append(clock_, channel, std::move(sender), std::move(receiver), std::move(payload));
}

void World::register_sensor(const std::string& sid) {
    if (sensors_.contains(sid)) throw ProtocolError(ProtocolErrc::registration_rejected, "SID already registered");
    const PkeKeyPair keys = pke_keygen(rng_);
    const SensorRegRequest req{sid, keys.public_key};
    GatewayState gw = gateway_;
    const SensorRegResponse resp = gateway_register_sensor(protocol_, gw, req, rng_);
    SensorState state = sensor_finalize_registration(sid, keys, resp);
    send(Channel::secure, sensor_name(sid), std::string(kGatewayName), encode(req));
    send(Channel::secure, std::string(kGatewayName), sensor_name(sid), encode(resp));
    gateway_ = std::move(gw);
    sensors_.emplace(sid, std::move(state));
}

void World::register_user(const UserCredentials& cred, const std::string& sid) {
    if (users_.contains(cred.id)) throw ProtocolError(ProtocolErrc::registration_rejected, "user already registered");
    if (!gateway_.sensor_table.contains(sid)) {
        throw ProtocolError(ProtocolErrc::registration_rejected, "sensor '" + sid + "' not registered");
    }
    const UserRegistrationStart start = user_register_request(protocol_, cred, rng_);
    GatewayState gw = gateway_;
    const UserRegResponse resp = gateway_register_user(protocol_, gw, start.request);
    gateway_add_route(gw, start.request.hid, sid);
    const SmartCardStore card = user_finalize_registration(protocol_, start.pending, resp);
    send(Channel::secure, user_name(cred.id), std::string(kGatewayName), encode(start.request));
    send(Channel::secure, std::string(kGatewayName), user_name(cred.id), encode(resp));
    gateway_ = std::move(gw);
    const UserTruth truth{start.pending.hid, protocol_.hash({start.pending.n.view(), start.pending.r1.view()})};
    users_.emplace(cred.id, UserRecord{cred, card, truth, sid});
}

void World::run_registration(const UserCredentials& cred, const std::string& sid) {
    register_sensor(sid);
    register_user(cred, sid);
}

void World::install_sensor(SensorState sn) {
    std::string sid = sn.sid;
    sensors_.insert_or_assign(std::move(sid), std::move(sn));
}

void World::install_user(const UserCredentials& cred, const SmartCardStore& card) {
    // Recompute the registration-time secrets the way the card's owner would.
    const Hash& h = protocol_.hash;
    const Sigma sigma = rep_fuzzy(cred.bio, card.tau);
    const Block n = password_block(h, cred.pw) ^ h({as_bytes(cred.id), sigma.view()});
    const Block r1 = card.omega ^ n;
    const Block hid = h({as_bytes(cred.id), r1.view()});
    std::string sid;
    if (auto it = gateway_.routing.find(hid); it != gateway_.routing.end()) sid = it->second;
    users_.insert_or_assign(cred.id, UserRecord{cred, card, UserTruth{hid, h({n.view(), r1.view()})}, sid});
}

void World::resume(std::uint64_t clock, std::uint64_t rng_counter) {
    if (clock < clock_ || rng_counter < rng_.counter()) throw std::invalid_argument("resume would rewind the world");
    clock_ = clock;
    rng_ = SeededRng(config_.seed, rng_counter);
}

std::optional<Bytes> World::intercept(MessageKind kind, Bytes frame) {
    auto it = std::find_if(armed_.begin(), armed_.end(), [kind](const AdversaryAction& a) {
        return (a.kind == ActionKind::drop || a.kind == ActionKind::modify) && a.target == kind;
    });
    if (it == armed_.end()) return frame;
    const AdversaryAction action = *it;
    armed_.erase(it);
    if (action.kind == ActionKind::drop) return std::nullopt;
    if (!action.payload.empty()) return action.payload;
    const auto field = find_field(kind, action.field);
    if (!field) throw std::invalid_argument("no Block field '" + action.field + "' in " + std::string(to_string(kind)));
    if (action.bit >= field->length * 8) throw std::invalid_argument("bit index out of range for a Block field");
    flip_bit(std::span<std::uint8_t>(frame).subspan(field->offset, field->length), action.bit);
    return frame;
}

SessionRun World::run_auth_session(const std::string& user_id) {
    auto it = users_.find(user_id);
    if (it == users_.end()) throw std::invalid_argument("no user '" + user_id + "' in world");
    return run_auth_session(user_id, it->second.cred);
}

SessionRun World::run_auth_session(const std::string& user_id, const UserCredentials& presented) {
    auto rec_it = users_.find(user_id);
    if (rec_it == users_.end()) throw std::invalid_argument("no user '" + user_id + "' in world");
    const UserRecord& rec = rec_it->second;

    SessionRun run;
    run.id = sessions_.size();
    run.user = user_id;
    ephemerals_.emplace_back();
    Ephemerals& eph = ephemerals_.back();
    const std::string uname = user_name(user_id);
    const std::string gname(kGatewayName);

    auto finish = [&]() -> SessionRun {
        sessions_.push_back(run);
        return run;
    };
    auto abort = [&](std::string party, Verdict verdict, std::string check) -> SessionRun {
        run.failure = SessionFailure{std::move(party), verdict, std::move(check)};
        user_sessions_.erase(user_id);
        gateway_session_.reset();
        return finish();
    };
    // Sends on the public channel through the adversary; nullopt when dropped.
    auto transmit = [&](const std::string& from, const std::string& to, const WireMessage& msg) -> std::optional<Bytes> {
        const MessageKind kind = kind_of(msg);
        std::optional<Bytes> frame = intercept(kind, encode(msg));
        const Bytes& recorded = frame ? *frame : encode(msg);
        const TranscriptEntry& e = send(Channel::public_channel, from, to, recorded);
        run.transcript_ids.push_back(e.seq);
        if (!frame) transcript_.note({"drop", clock_, std::string(to_string(kind))});
        return frame;
    };
    auto rx_time = [this] { return Timestamp{clock_ + 1}; };

    // User: local check against the card, then M1.
    UserLoginResult login;
    try {
        login = user_login(protocol_, presented, rec.card, rng_, rx_time());
    } catch (const ProtocolError& e) {
        return abort(uname, verdict_for(e.code()), e.check());
    }
    eph.r_u = login.session.r_u;
    user_sessions_[user_id] = login.session;
    std::vector<std::uint64_t> user_ids, gateway_ids, sensor_ids;

    auto f1 = transmit(uname, gname, login.m1);
    user_ids.push_back(run.transcript_ids.back());
    if (!f1) return abort(uname, Verdict::no_response, "no M4 received at user");

    // Gateway: M1 -> M2.
    std::string err;
    auto m1 = expect<M1>(*f1, err);
    if (!m1) return abort(gname, Verdict::decode_error, err);
    GatewayM1Result g1;
    try {
        g1 = gateway_process_m1(protocol_, gateway_, *m1, rng_, rx_time());
    } catch (const ProtocolError& e) {
        return abort(gname, verdict_for(e.code()), e.check());
    }
    eph.r_g = g1.session.r_g;
    gateway_session_ = g1.session;
    auto sensor_it = sensors_.find(g1.session.sid);
    if (sensor_it == sensors_.end()) return abort(gname, Verdict::no_response, "sensor " + g1.session.sid + " absent");
    const std::string sname = sensor_name(g1.session.sid);
    gateway_ids.push_back(run.transcript_ids.back());

    auto f2 = transmit(gname, sname, g1.m2);
    gateway_ids.push_back(run.transcript_ids.back());
    if (!f2) return abort(gname, Verdict::no_response, "no M3 received at gateway");

    // Sensor: M2 -> M3.
    auto m2 = expect<M2>(*f2, err);
    if (!m2) return abort(sname, Verdict::decode_error, err);
    SensorM2Result s2;
    try {
        s2 = sensor_process_m2(protocol_, sensor_it->second, *m2, rng_, rx_time());
    } catch (const ProtocolError& e) {
        return abort(sname, verdict_for(e.code()), e.check());
    }
    eph.r_s = s2.r_s;
    sensor_ids.push_back(run.transcript_ids.back());
    auto f3 = transmit(sname, gname, s2.m3);
    sensor_ids.push_back(run.transcript_ids.back());
    run.sensor_outcome = PartyOutcome{s2.sk, true, sensor_ids};
    if (!f3) return abort(gname, Verdict::no_response, "no M3 received at gateway");

    // Gateway: M3 -> M4.
    auto m3 = expect<M3>(*f3, err);
    if (!m3) return abort(gname, Verdict::decode_error, err);
    GatewayM3Result g3;
    try {
        g3 = gateway_process_m3(protocol_, gateway_, *gateway_session_, *m3, rx_time());
    } catch (const ProtocolError& e) {
        return abort(gname, verdict_for(e.code()), e.check());
    }
    gateway_ids.push_back(run.transcript_ids.back());
    auto f4 = transmit(gname, uname, g3.m4);
    gateway_ids.push_back(run.transcript_ids.back());
    gateway_session_.reset();
    run.gateway_outcome = PartyOutcome{g3.sk, true, gateway_ids};
    if (!f4) return abort(uname, Verdict::no_response, "no M4 received at user");

    // User: M4.
    auto m4 = expect<M4>(*f4, err);
    if (!m4) return abort(uname, Verdict::decode_error, err);
    UserM4Result u4;
    try {
        u4 = user_process_m4(protocol_, login.session, rec.card, *m4, rx_time());
    } catch (const ProtocolError& e) {
        return abort(uname, verdict_for(e.code()), e.check());
    }
    user_sessions_.erase(user_id);
    user_ids.push_back(run.transcript_ids.back());
    run.user_outcome = PartyOutcome{u4.sk, true, user_ids};
    return finish();
}

Delivery World::deliver(const TranscriptEntry& entry) {
    Delivery d{entry.seq, entry.receiver, Verdict::accepted, {}};
    const Timestamp now{clock_ + 1};
    std::string err;
    auto reject = [&d](Verdict v, std::string detail) {
        d.verdict = v;
        d.detail = std::move(detail);
        return d;
    };
    try {
        if (entry.receiver == kGatewayName) {
            WireMessage msg = decode(entry.payload);
            if (auto* m1 = std::get_if<M1>(&msg)) {
                GatewayM1Result r = gateway_process_m1(protocol_, gateway_, *m1, rng_, now);
                gateway_session_ = r.session;
                return d;
            }
            if (auto* m3 = std::get_if<M3>(&msg)) {
                check_fresh(protocol_, m3->t3, now, "T3 freshness at gateway");
                if (!gateway_session_) return reject(Verdict::rejected_unknown, "no open session at gateway");
                (void)gateway_process_m3(protocol_, gateway_, *gateway_session_, *m3, now);
                gateway_session_.reset();
                return d;
            }
            return reject(Verdict::decode_error, "unexpected " + std::string(to_string(kind_of(msg))) + " at gateway");
        }
        if (entry.receiver.starts_with("sensor:")) {
            auto it = sensors_.find(entry.receiver.substr(7));
            if (it == sensors_.end()) return reject(Verdict::rejected_unknown, "no such sensor");
            auto m2 = expect<M2>(entry.payload, err);
            if (!m2) return reject(Verdict::decode_error, err);
            (void)sensor_process_m2(protocol_, it->second, *m2, rng_, now);
            return d;
        }
        if (entry.receiver.starts_with("user:")) {
            const std::string id = entry.receiver.substr(5);
            auto rec = users_.find(id);
            if (rec == users_.end()) return reject(Verdict::rejected_unknown, "no such user");
            auto m4 = expect<M4>(entry.payload, err);
            if (!m4) return reject(Verdict::decode_error, err);
            check_fresh(protocol_, m4->t4, now, "T4 freshness at user");
            auto session = user_sessions_.find(id);
            if (session == user_sessions_.end()) return reject(Verdict::rejected_unknown, "no open session at user");
            (void)user_process_m4(protocol_, session->second, rec->second.card, *m4, now);
            user_sessions_.erase(session);
            return d;
        }
    } catch (const WireError& e) {
        return reject(Verdict::decode_error, e.what());
    } catch (const ProtocolError& e) {
        return reject(verdict_for(e.code()), e.check());
    }
    return reject(Verdict::rejected_unknown, "no such party '" + entry.receiver + "'");
}

std::optional<Delivery> World::adversary_act(const AdversaryAction& action) {
    switch (action.kind) {
        case ActionKind::observe:
            return std::nullopt;
        case ActionKind::drop:
        case ActionKind::modify:
            if (action.kind == ActionKind::modify && action.payload.empty() && !find_field(action.target, action.field)) {
                throw std::invalid_argument("no Block field '" + action.field + "' in " +
                                            std::string(to_string(action.target)));
            }
            armed_.push_back(action);
            return std::nullopt;
        case ActionKind::replay: {
            const TranscriptEntry* original = transcript_.find(action.seq);
            if (original == nullptr || original->channel != Channel::public_channel) {
                throw std::invalid_argument("replay target seq " + std::to_string(action.seq) +
                                            " is not a recorded public entry");
            }
            const TranscriptEntry copy = *original;
            clock_ += action.delay;
            const TranscriptEntry& e = send(Channel::public_channel, "adversary", copy.receiver, copy.payload);
            transcript_.note({"replay", clock_, "seq " + std::to_string(copy.seq)});
            return deliver(e);
        }
        case ActionKind::inject: {
            clock_ += action.delay;
            const TranscriptEntry& e = send(Channel::public_channel, "adversary", action.receiver, action.payload);
            transcript_.note({"inject", clock_, action.receiver});
            return deliver(e);
        }
    }
    return std::nullopt;
}

EphemeralLeak World::leak_ephemerals(std::uint64_t session_id) {
    if (session_id >= ephemerals_.size()) throw OracleUnavailable("session has not started");
    const Ephemerals& e = ephemerals_[session_id];
    if (!e.r_u || !e.r_g || !e.r_s) throw OracleUnavailable("ephemerals not yet generated for session");
    transcript_.note({"leak", clock_, "session " + std::to_string(session_id)});
    return {*e.r_u, *e.r_g, *e.r_s};
}

SmartCardStore World::dump_smart_card(const std::string& user_id) {
    auto it = users_.find(user_id);
    if (it == users_.end()) throw OracleUnavailable("user '" + user_id + "' is not registered");
    transcript_.note({"card-dump", clock_, user_id});
    return it->second.card;
}

UserTruth World::user_truth(const std::string& user_id) const {
    auto it = users_.find(user_id);
    if (it == users_.end()) throw std::invalid_argument("no user '" + user_id + "' in world");
    return it->second.truth;
}

const SessionRun& World::session(std::uint64_t session_id) const {
    if (session_id >= sessions_.size()) throw std::out_of_range("no such session");
    return sessions_[session_id];
}

}  // namespace akap
