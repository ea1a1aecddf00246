#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

namespace akap {
namespace {

namespace fs = std::filesystem;

FormatErrc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected FormatError";
    return FormatErrc::io;
}

class Storage : public ::testing::Test {
protected:
    void SetUp() override {
        world_.register_user(test::user_for(2, "v"), "sensor-1");
        dir_ = fs::temp_directory_path() / ("akap-storage-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    World world_ = test::registered_world(seed_from_index(1), test::user_for(1));
    fs::path dir_;
};

TEST_F(Storage, RoundTrips) {
    const GatewayState& gw = world_.gateway();
    EXPECT_EQ(gateway_from_json(state_to_json(gw)), gw);
    const SensorState& sn = world_.sensor("sensor-1");
    EXPECT_EQ(sensor_from_json(state_to_json(sn)), sn);
    const SmartCardStore& card = world_.card("u");
    EXPECT_EQ(card_from_json(state_to_json(card)), card);
    const DeploymentCounters c{world_.clock(), world_.rng_counter()};
    EXPECT_EQ(counters_from_json(state_to_json(c)), c);
    const SessionRun r = world_.run_auth_session("u");
    const GroundTruth g{r.id, "u", r.user_outcome->sk, world_.leak_ephemerals(r.id), world_.user_truth("u")};
    EXPECT_EQ(truth_from_json(state_to_json(g)), g);
    const EphemeralLeak leak = world_.leak_ephemerals(r.id);
    const EphemeralLeak back = leak_from_json(leak_to_json(leak, r.id));
    EXPECT_EQ(back, leak);
}

TEST_F(Storage, CanonicalBytes) {
    const std::string a = state_to_json(world_.gateway());
    EXPECT_EQ(state_to_json(gateway_from_json(a)), a);
    // Keys are sorted at every level.
    EXPECT_LT(a.find("\"body\""), a.find("\"fmt\""));
    EXPECT_LT(a.find("\"gj\""), a.find("\"routing\""));
    EXPECT_EQ(a.find_first_of("ABCDEF"), std::string::npos);
}

TEST_F(Storage, FilesNeedAckAndReportPaths) {
    const fs::path p = dir_ / "card.json";
    save_state(p, world_.card("u"), AllowPlaintext{});
    EXPECT_EQ(card_from_json(read_text_file(p)), world_.card("u"));
    try {
        (void)read_text_file(dir_ / "missing.json");
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.code(), FormatErrc::io);
        EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
    }
    EXPECT_EQ(code_of([&] { write_text_file(dir_ / "no" / "such" / "dir.json", "x"); }), FormatErrc::io);
}

TEST_F(Storage, DistinctErrors) {
    const std::string card = state_to_json(world_.card("u"));
    EXPECT_EQ(code_of([&] { (void)gateway_from_json(card); }), FormatErrc::wrong_kind);
    EXPECT_EQ(code_of([&] { (void)card_from_json("not json"); }), FormatErrc::malformed_json);

    auto edit = [&](const std::string& from, const std::string& to) {
        std::string s = card;
        const auto at = s.find(from);
        EXPECT_NE(at, std::string::npos) << from;
        s.replace(at, from.size(), to);
        return s;
    };
    const std::string d1 = "\"d1\": \"" + to_hex(world_.card("u").d1) + "\"";
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit(d1, "\"d1\": \"zz\"")); }), FormatErrc::malformed_hex);
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit(d1, "\"d1\": \"00\"")); }), FormatErrc::bad_length);
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit(d1, "\"d1\": 7")); }), FormatErrc::malformed_hex);
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit("\"v\": 1", "\"v\": 9")); }), FormatErrc::unknown_version);
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit("\"fmt\": \"akap-state\"", "\"fmt\": \"x\"")); }),
              FormatErrc::wrong_kind);
    EXPECT_EQ(code_of([&] { (void)card_from_json(edit(d1 + ",", "")); }), FormatErrc::malformed_json);

    std::string gw = state_to_json(world_.gateway());
    const std::string sid = "\"sid\": \"sensor-1\"";
    gw.replace(gw.find(sid), sid.size(), "\"sid\": \"\"");
    EXPECT_EQ(code_of([&] { (void)gateway_from_json(gw); }), FormatErrc::invariant);
}

TEST_F(Storage, IdenticalSeedsGiveIdenticalFiles) {
    World other = test::registered_world(seed_from_index(1), test::user_for(1));
    other.register_user(test::user_for(2, "v"), "sensor-1");
    EXPECT_EQ(state_to_json(other.gateway()), state_to_json(world_.gateway()));
    EXPECT_EQ(state_to_json(other.sensor("sensor-1")), state_to_json(world_.sensor("sensor-1")));
    EXPECT_EQ(state_to_json(other.card("v")), state_to_json(world_.card("v")));
}

}  // namespace
}  // namespace akap
