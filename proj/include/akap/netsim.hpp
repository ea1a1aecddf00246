#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "akap/messages.hpp"
#include "akap/protocol.hpp"

namespace akap {

enum class Channel { public_channel, secure };

struct TranscriptEntry {
    std::uint64_t seq{0};
    std::uint64_t tick{0};
    Channel channel{Channel::public_channel};
    std::string sender;
    std::string receiver;
    Bytes payload;
    friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

// Oracle uses (ephemeral leaks, card dumps) are logged next to the traffic.
struct TranscriptEvent {
    std::string kind;
    std::uint64_t tick{0};
    std::string subject;
    friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

class Transcript {
public:
    const TranscriptEntry& append(std::uint64_t tick, Channel channel, std::string sender, std::string receiver,
                                  Bytes payload);
    void note(TranscriptEvent event) { events_.push_back(std::move(event)); }

    [[nodiscard]] const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const std::vector<TranscriptEvent>& events() const noexcept { return events_; }
    [[nodiscard]] const TranscriptEntry* find(std::uint64_t seq) const noexcept;
    // Public-channel entries only, in order.
    [[nodiscard]] std::vector<TranscriptEntry> public_entries() const;

    // {"fmt":"akap-transcript","v":1,"entries":[...],"events":[...]}
    [[nodiscard]] std::string to_json() const;
    // Throws FormatError.
    [[nodiscard]] static Transcript from_json(std::string_view text);

    friend bool operator==(const Transcript&, const Transcript&) = default;

private:
    std::vector<TranscriptEntry> entries_;
    std::vector<TranscriptEvent> events_;
};

enum class Verdict {
    accepted,
    rejected_stale,
    rejected_authenticator,
    rejected_unknown,
    rejected_local,
    decode_error,
    no_response,
};

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;
[[nodiscard]] Verdict verdict_for(ProtocolErrc code) noexcept;

struct Delivery {
    std::uint64_t seq{0};  // transcript entry that carried the frame
    std::string receiver;
    Verdict verdict{Verdict::accepted};
    std::string detail;  // failed check, decode error, or empty
};

enum class ActionKind { observe, drop, modify, inject, replay };

// Dolev-Yao powers over the public channel.
//  drop/modify: armed against the next frame of `target` kind in the next session.
//  modify: flips `bit` of Block `field`, or replaces the frame with `payload` when nonempty.
//  replay: re-sends public entry `seq` to its original receiver after `delay` ticks.
//  inject: delivers `payload` to `receiver` after `delay` ticks.
struct AdversaryAction {
    ActionKind kind{ActionKind::observe};
    MessageKind target{MessageKind::m1};
    std::string field;
    std::size_t bit{0};
    std::uint64_t seq{0};
    std::uint64_t delay{0};
    std::string receiver;
    Bytes payload;
};

struct PartyOutcome {
    Block sk;
    bool peer_confirmed{false};
    std::vector<std::uint64_t> transcript_ids;
};

struct SessionFailure {
    std::string party;
    Verdict verdict{Verdict::accepted};
    std::string check;
};

struct SessionRun {
    std::uint64_t id{0};
    std::string user;
    std::optional<PartyOutcome> user_outcome;
    std::optional<PartyOutcome> gateway_outcome;
    std::optional<PartyOutcome> sensor_outcome;
    std::optional<SessionFailure> failure;
    std::vector<std::uint64_t> transcript_ids;

    [[nodiscard]] bool all_confirmed() const noexcept {
        return !failure && user_outcome && gateway_outcome && sensor_outcome && user_outcome->peer_confirmed &&
               gateway_outcome->peer_confirmed && sensor_outcome->peer_confirmed;
    }
};

struct EphemeralLeak {
    Block r_u, r_g, r_s;
    friend bool operator==(const EphemeralLeak&, const EphemeralLeak&) = default;
};

// Ground truth about a registered user, for adjudicating attacks.
struct UserTruth {
    Block hid;
    Block h_n_r1;  // h(N || r1)
    friend bool operator==(const UserTruth&, const UserTruth&) = default;
};

class OracleUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WorldConfig {
    Block seed;
    std::uint64_t delta = 2;
    std::string hash = "sha256";
    bool quirk_double_rg = false;
};

// Deterministic simulated deployment: one gateway, any number of users and
// sensors, a logical clock that advances one tick per send, and a transcript
// of everything that crossed either channel.
class World {
public:
    // Throws std::invalid_argument for delta == 0 or an unknown hash.
    explicit World(WorldConfig config);

    [[nodiscard]] const WorldConfig& config() const noexcept { return config_; }
    [[nodiscard]] const ProtocolConfig& protocol() const noexcept { return protocol_; }
    [[nodiscard]] std::uint64_t clock() const noexcept { return clock_; }
    [[nodiscard]] std::uint64_t rng_counter() const noexcept { return rng_.counter(); }
    [[nodiscard]] const Transcript& transcript() const noexcept { return transcript_; }
    [[nodiscard]] const GatewayState& gateway() const noexcept { return gateway_; }
    [[nodiscard]] const SensorState& sensor(const std::string& sid) const;
    [[nodiscard]] const SmartCardStore& card(const std::string& user_id) const;
    [[nodiscard]] bool has_user(const std::string& user_id) const { return users_.contains(user_id); }

    // Secure-channel registration. Throws ProtocolError(registration_rejected) on duplicates.
    void register_sensor(const std::string& sid);
    void register_user(const UserCredentials& cred, const std::string& sid);
    void run_registration(const UserCredentials& cred, const std::string& sid);

    // Adopt persisted party state instead of registering.
    void install_gateway(GatewayState gw) { gateway_ = std::move(gw); }
    void install_sensor(SensorState sn);
    void install_user(const UserCredentials& cred, const SmartCardStore& card);
    // Continue a deployment persisted by an earlier process: same seed, later
    // position in the rng stream and on the clock. Never moves backwards.
    void resume(std::uint64_t clock, std::uint64_t rng_counter);

    // Runs M1..M4 over the public channel, applying any armed adversary actions.
    SessionRun run_auth_session(const std::string& user_id);
    // Same, with the user presenting a different reading/password at login.
    SessionRun run_auth_session(const std::string& user_id, const UserCredentials& presented);

    // Drop/modify are armed for the next session; replay/inject deliver now.
    std::optional<Delivery> adversary_act(const AdversaryAction& action);
    [[nodiscard]] std::vector<TranscriptEntry> adversary_view() const { return transcript_.public_entries(); }

    // Oracles. Each use is logged as a transcript event.
    EphemeralLeak leak_ephemerals(std::uint64_t session_id);
    SmartCardStore dump_smart_card(const std::string& user_id);

    // Ground truth, for adjudication only.
    [[nodiscard]] UserTruth user_truth(const std::string& user_id) const;
    [[nodiscard]] const SessionRun& session(std::uint64_t session_id) const;

    [[nodiscard]] static std::string user_name(const std::string& id) { return "user:" + id; }
    [[nodiscard]] static std::string sensor_name(const std::string& sid) { return "sensor:" + sid; }
    static constexpr std::string_view kGatewayName = "gateway";

private:
    struct UserRecord {
        UserCredentials cred;
        SmartCardStore card;
        UserTruth truth;
        std::string sid;
    };
    struct Ephemerals {
        std::optional<Block> r_u, r_g, r_s;
    };

    Timestamp advance() { return Timestamp{++clock_}; }
    const TranscriptEntry& send(Channel channel, std::string sender, std::string receiver, Bytes payload);
    // Applies armed drop/modify actions to an outgoing public frame; nullopt means dropped.
    std::optional<Bytes> intercept(MessageKind kind, Bytes frame);
    Delivery deliver(const TranscriptEntry& entry);

    WorldConfig config_;
    ProtocolConfig protocol_;
    SeededRng rng_;
    std::uint64_t clock_{0};
    Transcript transcript_;
    GatewayState gateway_;
    std::map<std::string, UserRecord> users_;
    std::map<std::string, SensorState> sensors_;
    std::vector<AdversaryAction> armed_;
    std::vector<SessionRun> sessions_;
    std::vector<Ephemerals> ephemerals_;
    std::optional<GatewaySessionState> gateway_session_;
    std::map<std::string, UserSessionState> user_sessions_;
};

}  // namespace akap
