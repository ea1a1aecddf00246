#include <gtest/gtest.h>

#include "support.hpp"

namespace akap {
namespace {

using test::registered_world;
using test::user_for;

TEST(World, HonestSessionAndTicks) {
    World w = registered_world(seed_from_index(1), user_for(1));
    EXPECT_EQ(w.clock(), 4u);
    const SessionRun r = w.run_auth_session("u");
    ASSERT_TRUE(r.all_confirmed());
    EXPECT_EQ(r.transcript_ids, (std::vector<std::uint64_t>{5, 6, 7, 8}));
    EXPECT_EQ(w.clock(), 8u);
    const auto view = w.adversary_view();
    ASSERT_EQ(view.size(), 4u);
    EXPECT_EQ(view[0].sender, "user:u");
    EXPECT_EQ(view[0].receiver, "gateway");
    EXPECT_EQ(view[1].receiver, "sensor:sensor-1");
    EXPECT_EQ(view[3].receiver, "user:u");
    for (const auto& e : view) EXPECT_EQ(e.tick, e.seq);
    // Each message's timestamp is the tick it was sent on.
    EXPECT_EQ(std::get<M1>(decode(view[0].payload)).t1.ticks, view[0].tick);
    EXPECT_EQ(std::get<M4>(decode(view[3].payload)).t4.ticks, view[3].tick);
}

TEST(World, SecureChannelIsNotInTheView) {
    World w = registered_world(seed_from_index(2), user_for(2));
    EXPECT_EQ(w.transcript().entries().size(), 4u);
    EXPECT_TRUE(w.adversary_view().empty());
    for (const auto& e : w.transcript().entries()) EXPECT_EQ(e.channel, Channel::secure);
}

TEST(World, Determinism) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        World a = registered_world(seed_from_index(s), user_for(s));
        World b = registered_world(seed_from_index(s), user_for(s));
        (void)a.run_auth_session("u");
        (void)b.run_auth_session("u");
        EXPECT_EQ(a.transcript().to_json(), b.transcript().to_json());
        World c = registered_world(seed_from_index(s + 1000), user_for(s));
        (void)c.run_auth_session("u");
        EXPECT_NE(a.transcript().to_json(), c.transcript().to_json());
    }
}

TEST(World, ConfigValidation) {
    EXPECT_THROW(World(WorldConfig{seed_from_index(0), 0, "sha256", false}), std::invalid_argument);
    EXPECT_THROW(World(WorldConfig{seed_from_index(0), 2, "md5", false}), std::invalid_argument);
}

TEST(World, RegistrationRejections) {
    World w = registered_world(seed_from_index(3), user_for(3));
    EXPECT_THROW(w.register_sensor("sensor-1"), ProtocolError);
    EXPECT_THROW(w.register_user(user_for(3), "sensor-1"), ProtocolError);
    EXPECT_THROW(w.register_user(user_for(4, "v"), "missing"), ProtocolError);
    EXPECT_FALSE(w.has_user("v"));
    EXPECT_EQ(w.clock(), 4u);
}

TEST(World, DropM2StallsTheGateway) {
    World w = registered_world(seed_from_index(4), user_for(4));
    AdversaryAction drop;
    drop.kind = ActionKind::drop;
    drop.target = MessageKind::m2;
    EXPECT_FALSE(w.adversary_act(drop));
    const SessionRun r = w.run_auth_session("u");
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->party, "gateway");
    EXPECT_EQ(r.failure->verdict, Verdict::no_response);
    EXPECT_FALSE(r.sensor_outcome);
    EXPECT_EQ(w.transcript().events().back().kind, "drop");
    // The action was consumed; the next session is clean.
    EXPECT_TRUE(w.run_auth_session("u").all_confirmed());
}

TEST(World, DropM3StallsTheGateway) {
    World w = registered_world(seed_from_index(9), user_for(9));
    AdversaryAction drop;
    drop.kind = ActionKind::drop;
    drop.target = MessageKind::m3;
    (void)w.adversary_act(drop);
    const SessionRun r = w.run_auth_session("u");
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->party, "gateway");
    EXPECT_EQ(r.failure->verdict, Verdict::no_response);
    EXPECT_TRUE(r.sensor_outcome);
    EXPECT_FALSE(r.user_outcome);
}

TEST(World, DropM4LeavesUserWithoutKey) {
    World w = registered_world(seed_from_index(5), user_for(5));
    AdversaryAction drop;
    drop.kind = ActionKind::drop;
    drop.target = MessageKind::m4;
    (void)w.adversary_act(drop);
    const SessionRun r = w.run_auth_session("u");
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->party, "user:u");
    EXPECT_TRUE(r.gateway_outcome);
    EXPECT_FALSE(r.user_outcome);
}

TEST(World, ModifiedFieldIsRejectedByFirstVerifier) {
    const struct {
        MessageKind kind;
        const char* field;
        const char* party;
        Verdict verdict;
    } cases[] = {
        {MessageKind::m1, "hid", "gateway", Verdict::rejected_unknown},
        {MessageKind::m1, "b2", "gateway", Verdict::rejected_authenticator},
        {MessageKind::m2, "b5", "sensor:sensor-1", Verdict::rejected_authenticator},
        {MessageKind::m2, "b6", "sensor:sensor-1", Verdict::rejected_authenticator},
        {MessageKind::m3, "x_sg", "gateway", Verdict::rejected_authenticator},
        {MessageKind::m3, "x_su", "user:u", Verdict::rejected_authenticator},
        {MessageKind::m4, "b11", "user:u", Verdict::rejected_authenticator},
    };
    for (const auto& c : cases) {
        World w = registered_world(seed_from_index(6), user_for(6));
        AdversaryAction act;
        act.kind = ActionKind::modify;
        act.target = c.kind;
        act.field = c.field;
        act.bit = 17;
        (void)w.adversary_act(act);
        const SessionRun r = w.run_auth_session("u");
        ASSERT_TRUE(r.failure) << c.field;
        EXPECT_EQ(r.failure->party, c.party) << c.field;
        EXPECT_EQ(r.failure->verdict, c.verdict) << c.field;
    }
    World w = registered_world(seed_from_index(6), user_for(6));
    AdversaryAction bad;
    bad.kind = ActionKind::modify;
    bad.field = "nope";
    EXPECT_THROW(w.adversary_act(bad), std::invalid_argument);
}

TEST(World, ModifyWithPayloadReplacesFrame) {
    World w = registered_world(seed_from_index(7), user_for(7));
    AdversaryAction act;
    act.kind = ActionKind::modify;
    act.target = MessageKind::m2;
    act.payload = Bytes{0x02, 0x00};
    (void)w.adversary_act(act);
    const SessionRun r = w.run_auth_session("u");
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->verdict, Verdict::decode_error);
    EXPECT_EQ(w.transcript().entries().at(5).payload, act.payload);
}

AdversaryAction replay_of(std::uint64_t seq, std::uint64_t delay) {
    AdversaryAction a;
    a.kind = ActionKind::replay;
    a.seq = seq;
    a.delay = delay;
    return a;
}

TEST(World, ReplayAfterWindowIsStale) {
    for (std::uint64_t seq = 5; seq <= 8; ++seq) {
        World w = registered_world(seed_from_index(8), user_for(8));
        ASSERT_TRUE(w.run_auth_session("u").all_confirmed());
        const auto d = w.adversary_act(replay_of(seq, w.config().delta + 1));
        ASSERT_TRUE(d);
        EXPECT_EQ(d->verdict, Verdict::rejected_stale) << seq;
        EXPECT_EQ(w.transcript().entries().back().sender, "adversary");
        EXPECT_EQ(w.transcript().events().back().kind, "replay");
    }
}

TEST(World, ReplayInsideWindow) {
    // With a wide window an immediate M1 replay is accepted: timestamps alone
    // do not stop it. A late M4 finds no open session.
    World w = registered_world(seed_from_index(9), user_for(9), 10);
    ASSERT_TRUE(w.run_auth_session("u").all_confirmed());
    EXPECT_EQ(w.adversary_act(replay_of(5, 0))->verdict, Verdict::accepted);
    const auto m4 = w.adversary_act(replay_of(8, 0));
    EXPECT_EQ(m4->verdict, Verdict::rejected_unknown);
    EXPECT_THROW(w.adversary_act(replay_of(1, 0)), std::invalid_argument);  // secure entry
    EXPECT_THROW(w.adversary_act(replay_of(99, 0)), std::invalid_argument);
}

TEST(World, InjectGarbage) {
    World w = registered_world(seed_from_index(10), user_for(10));
    AdversaryAction a;
    a.kind = ActionKind::inject;
    a.receiver = "gateway";
    a.payload = Bytes{0x01, 0x02};
    EXPECT_EQ(w.adversary_act(a)->verdict, Verdict::decode_error);
    a.receiver = "sensor:nope";
    EXPECT_EQ(w.adversary_act(a)->verdict, Verdict::rejected_unknown);
    a.receiver = "nobody";
    EXPECT_EQ(w.adversary_act(a)->verdict, Verdict::rejected_unknown);
    EXPECT_EQ(w.transcript().events().back().kind, "inject");
}

TEST(World, WrongPasswordStopsBeforeTheNetwork) {
    World w = registered_world(seed_from_index(11), user_for(11));
    UserCredentials bad = user_for(11);
    bad.pw = "guess";
    const SessionRun r = w.run_auth_session("u", bad);
    ASSERT_TRUE(r.failure);
    EXPECT_EQ(r.failure->verdict, Verdict::rejected_local);
    EXPECT_TRUE(w.adversary_view().empty());
}

TEST(World, OraclesAreLogged) {
    World w = registered_world(seed_from_index(12), user_for(12));
    EXPECT_THROW((void)w.leak_ephemerals(0), OracleUnavailable);
    EXPECT_THROW((void)w.dump_smart_card("nobody"), OracleUnavailable);
    const SessionRun r = w.run_auth_session("u");
    (void)w.leak_ephemerals(r.id);
    (void)w.dump_smart_card("u");
    const auto& ev = w.transcript().events();
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0].kind, "leak");
    EXPECT_EQ(ev[1].kind, "card-dump");
    EXPECT_EQ(ev[1].subject, "u");
}

TEST(World, InstalledStateResumes) {
    World a = registered_world(seed_from_index(13), user_for(13));
    World b(a.config());
    b.install_gateway(a.gateway());
    b.install_sensor(a.sensor("sensor-1"));
    b.install_user(user_for(13), a.card("u"));
    b.resume(a.clock(), a.rng_counter());
    EXPECT_EQ(b.user_truth("u"), a.user_truth("u"));
    const SessionRun ra = a.run_auth_session("u");
    const SessionRun rb = b.run_auth_session("u");
    ASSERT_TRUE(rb.all_confirmed());
    EXPECT_EQ(ra.user_outcome->sk, rb.user_outcome->sk);
    EXPECT_THROW(b.resume(0, 0), std::invalid_argument);
}

TEST(Transcript, JsonRoundTrip) {
    World w = registered_world(seed_from_index(14), user_for(14));
    (void)w.run_auth_session("u");
    (void)w.leak_ephemerals(0);
    const std::string json = w.transcript().to_json();
    const Transcript back = Transcript::from_json(json);
    EXPECT_EQ(back, w.transcript());
    EXPECT_EQ(back.to_json(), json);
    EXPECT_NE(json.find("\"fmt\": \"akap-transcript\""), std::string::npos);
}

FormatErrc format_code(std::string_view text) {
    try {
        (void)Transcript::from_json(text);
    } catch (const FormatError& e) {
        return e.code();
    }
    ADD_FAILURE() << "accepted: " << text;
    return FormatErrc::io;
}

TEST(Transcript, JsonErrors) {
    EXPECT_EQ(format_code("{"), FormatErrc::malformed_json);
    EXPECT_EQ(format_code(R"({"fmt":"akap-state","v":1})"), FormatErrc::wrong_kind);
    EXPECT_EQ(format_code(R"({"fmt":"akap-transcript","v":2,"entries":[],"events":[]})"), FormatErrc::unknown_version);
    const std::string entry = R"({"seq":0,"tick":1,"channel":"public","sender":"a","receiver":"b","payload_hex":"zz"})";
    EXPECT_EQ(format_code(R"({"fmt":"akap-transcript","v":1,"entries":[)" + entry + R"(],"events":[]})"),
              FormatErrc::malformed_hex);
    const std::string e0 = R"({"seq":1,"tick":1,"channel":"public","sender":"a","receiver":"b","payload_hex":"00"})";
    EXPECT_EQ(format_code(R"({"fmt":"akap-transcript","v":1,"entries":[)" + e0 + "," + e0 + R"(],"events":[]})"),
              FormatErrc::invariant);
}

}  // namespace
}  // namespace akap
