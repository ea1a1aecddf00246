#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "akap/netsim.hpp"

namespace akap {

// Party state on disk: {"fmt":"akap-state","v":1,"kind":...,"body":{...}}.
// Keys sorted, Blocks as lowercase hex, so equal state gives equal bytes.
// Nothing is encrypted. Writing requires an AllowPlaintext token, which the
// CLI only mints when the operator passes --allow-plaintext-state.
struct AllowPlaintext {
    explicit AllowPlaintext() = default;
};

// Where a persisted deployment stands in its clock and rng stream.
struct DeploymentCounters {
    std::uint64_t clock{0};
    std::uint64_t rng_counter{0};
    friend bool operator==(const DeploymentCounters&, const DeploymentCounters&) = default;
};

// Evaluator-side record of one session, kept apart from attacker artifacts.
struct GroundTruth {
    std::uint64_t session_id{0};
    std::string user_id;
    Block sk;
    EphemeralLeak ephemerals;
    UserTruth user;
    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

[[nodiscard]] std::string state_to_json(const GatewayState& s);
[[nodiscard]] std::string state_to_json(const SensorState& s);
[[nodiscard]] std::string state_to_json(const SmartCardStore& s);
[[nodiscard]] std::string state_to_json(const DeploymentCounters& s);
[[nodiscard]] std::string state_to_json(const GroundTruth& s);

// All throw FormatError: wrong_kind if the file holds another kind of state.
[[nodiscard]] GatewayState gateway_from_json(std::string_view text);
[[nodiscard]] SensorState sensor_from_json(std::string_view text);
[[nodiscard]] SmartCardStore card_from_json(std::string_view text);
[[nodiscard]] DeploymentCounters counters_from_json(std::string_view text);
[[nodiscard]] GroundTruth truth_from_json(std::string_view text);

// Ephemeral leak artifact ({"fmt":"akap-leak","v":1,...}); not party state.
[[nodiscard]] std::string leak_to_json(const EphemeralLeak& leak, std::uint64_t session_id);
[[nodiscard]] EphemeralLeak leak_from_json(std::string_view text);

// FormatError(io) with the path in the message.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

template <class State>
void save_state(const std::filesystem::path& path, const State& state, AllowPlaintext) {
    write_text_file(path, state_to_json(state));
}

}  // namespace akap
