#include "akap/storage.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace akap {

using detail::json;

namespace {

std::string wrap(std::string_view kind, json body) {
    json doc;
    doc["fmt"] = "akap-state";
    doc["v"] = 1;
    doc["kind"] = kind;
    doc["body"] = std::move(body);
    return doc.dump(2) + "\n";
}

json unwrap(std::string_view text, std::string_view kind) {
    json doc = detail::parse_json(text);
    detail::check_header(doc, "akap-state");
    const std::string got = detail::string_field(doc, "kind");
    if (got != kind) throw FormatError(FormatErrc::wrong_kind, "expected " + std::string(kind) + " state, got " + got);
    json body = detail::member(doc, "body");
    if (!body.is_object()) throw FormatError(FormatErrc::malformed_json, "body must be an object");
    return body;
}

const json& array_field(const json& obj, std::string_view key) {
    const json& v = detail::member(obj, key);
    if (!v.is_array()) throw FormatError(FormatErrc::malformed_json, "field '" + std::string(key) + "' must be an array");
    return v;
}

json leak_body(const EphemeralLeak& e) {
    return json{{"r_u", to_hex(e.r_u)}, {"r_g", to_hex(e.r_g)}, {"r_s", to_hex(e.r_s)}};
}

EphemeralLeak leak_body_from(const json& j) {
    return EphemeralLeak{detail::block_field(j, "r_u"), detail::block_field(j, "r_g"), detail::block_field(j, "r_s")};
}

std::string nonempty_string(const json& obj, std::string_view key) {
    std::string s = detail::string_field(obj, key);
    if (s.empty()) throw FormatError(FormatErrc::invariant, "field '" + std::string(key) + "' must not be empty");
    return s;
}

}  // namespace

std::string state_to_json(const GatewayState& s) {
    json users = json::array();
    for (const auto& [hid, d1] : s.user_table) users.push_back({{"hid", to_hex(hid)}, {"d1", to_hex(d1)}});
    json sensors = json::array();
    for (const auto& [sid, pid] : s.sensor_table) sensors.push_back({{"sid", sid}, {"pid", to_hex(pid)}});
    json routes = json::array();
    for (const auto& [hid, sid] : s.routing) routes.push_back({{"hid", to_hex(hid)}, {"sid", sid}});
    return wrap("gateway", {{"gj", to_hex(s.gj)}, {"users", users}, {"sensors", sensors}, {"routing", routes}});
}

std::string state_to_json(const SensorState& s) {
    return wrap("sensor", {{"sid", s.sid},
                           {"sg", to_hex(s.sg)},
                           {"l", to_hex(s.l)},
                           {"pid", to_hex(s.pid)},
                           {"public_key", to_hex(s.keys.public_key)},
                           {"private_key", to_hex(s.keys.private_key)}});
}

std::string state_to_json(const SmartCardStore& s) {
    return wrap("card", {{"d1", to_hex(s.d1)},
                         {"d3", to_hex(s.d3)},
                         {"d4", to_hex(s.d4)},
                         {"omega", to_hex(s.omega)},
                         {"m", to_hex(s.m)},
                         {"tau", to_hex(s.tau)}});
}

std::string state_to_json(const DeploymentCounters& s) {
    return wrap("deployment", {{"clock", s.clock}, {"rng_counter", s.rng_counter}});
}

std::string state_to_json(const GroundTruth& s) {
    return wrap("ground-truth", {{"session_id", s.session_id},
                                 {"user_id", s.user_id},
                                 {"sk", to_hex(s.sk)},
                                 {"ephemerals", leak_body(s.ephemerals)},
                                 {"hid", to_hex(s.user.hid)},
                                 {"h_n_r1", to_hex(s.user.h_n_r1)}});
}

GatewayState gateway_from_json(std::string_view text) {
    const json body = unwrap(text, "gateway");
    GatewayState s;
    s.gj = detail::block_field(body, "gj");
    for (const auto& u : array_field(body, "users")) {
        if (!s.user_table.emplace(detail::block_field(u, "hid"), detail::block_field(u, "d1")).second) {
            throw FormatError(FormatErrc::invariant, "duplicate HID in gateway user table");
        }
    }
    for (const auto& sn : array_field(body, "sensors")) {
        if (!s.sensor_table.emplace(nonempty_string(sn, "sid"), detail::block_field(sn, "pid")).second) {
            throw FormatError(FormatErrc::invariant, "duplicate SID in gateway sensor table");
        }
    }
    for (const auto& r : array_field(body, "routing")) {
        if (!s.routing.emplace(detail::block_field(r, "hid"), nonempty_string(r, "sid")).second) {
            throw FormatError(FormatErrc::invariant, "duplicate HID in routing table");
        }
    }
    return s;
}

SensorState sensor_from_json(std::string_view text) {
    const json body = unwrap(text, "sensor");
    SensorState s;
    s.sid = nonempty_string(body, "sid");
    s.sg = detail::block_field(body, "sg");
    s.l = detail::hex_value(detail::member(body, "l"), "l");
    s.pid = detail::block_field(body, "pid");
    s.keys.public_key = detail::hex_value(detail::member(body, "public_key"), "public_key");
    s.keys.private_key = detail::hex_value(detail::member(body, "private_key"), "private_key");
    if (s.keys.public_key.size() != 32 || s.keys.private_key.size() != 32) {
        throw FormatError(FormatErrc::bad_length, "sensor key pair must be 32-byte X25519 keys");
    }
    if (s.l.empty()) throw FormatError(FormatErrc::invariant, "sensor ciphertext L must not be empty");
    return s;
}

SmartCardStore card_from_json(std::string_view text) {
    const json body = unwrap(text, "card");
    SmartCardStore s;
    s.d1 = detail::block_field(body, "d1");
    s.d3 = detail::block_field(body, "d3");
    s.d4 = detail::block_field(body, "d4");
    s.omega = detail::block_field(body, "omega");
    s.m = detail::block_field(body, "m");
    s.tau = detail::fixed_value<HelperData::size>(detail::member(body, "tau"), "tau");
    return s;
}

DeploymentCounters counters_from_json(std::string_view text) {
    const json body = unwrap(text, "deployment");
    return DeploymentCounters{detail::uint_field(body, "clock"), detail::uint_field(body, "rng_counter")};
}

GroundTruth truth_from_json(std::string_view text) {
    const json body = unwrap(text, "ground-truth");
    GroundTruth g;
    g.session_id = detail::uint_field(body, "session_id");
    g.user_id = nonempty_string(body, "user_id");
    g.sk = detail::block_field(body, "sk");
    g.ephemerals = leak_body_from(detail::member(body, "ephemerals"));
    g.user = UserTruth{detail::block_field(body, "hid"), detail::block_field(body, "h_n_r1")};
    return g;
}

std::string leak_to_json(const EphemeralLeak& leak, std::uint64_t session_id) {
    json doc;
    doc["fmt"] = "akap-leak";
    doc["v"] = 1;
    doc["session_id"] = session_id;
    doc["ephemerals"] = leak_body(leak);
    return doc.dump(2) + "\n";
}

EphemeralLeak leak_from_json(std::string_view text) {
    const json doc = detail::parse_json(text);
    detail::check_header(doc, "akap-leak");
    (void)detail::uint_field(doc, "session_id");
    return leak_body_from(detail::member(doc, "ephemerals"));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatErrc::io, "cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw FormatError(FormatErrc::io, "read failed: " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrc::io, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw FormatError(FormatErrc::io, "write failed: " + path.string());
}

}  // namespace akap
