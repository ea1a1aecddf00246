// akap: drive a simulated deployment from the shell.
//
// State lives in --state-dir as plaintext JSON (gateway.json, sensor-<sid>.json,
// card-<id>.json, deployment.json, ground-truth.json); each invocation loads
// it, acts, and writes it back.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "akap/attacks.hpp"
#include "akap/storage.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using namespace akap;

namespace {

enum Exit : int {
    kOk = 0,
    kAttackFailed = 1,
    kRejected = 2,
    kIo = 3,
    kVerification = 4,
    kNoOracle = 5,
    kBudget = 6,
    kUsage = 64,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string seed = std::string(64, '0');
    std::uint64_t delta = 2;
    std::string hash = "sha256";
    std::string state_dir = ".";
    std::string out;
    bool quirk_double_rg = false;
    bool allow_plaintext = false;
    bool reveal_keys = false;
};

struct UserArgs {
    std::string id;
    std::string pw;
    std::string bio_seed;
    unsigned noise = 0;
};

Biometric biometric_from_seed(std::string_view seed) {
    Biometric bio;
    std::size_t filled = 0;
    for (std::uint8_t i = 0; filled < bio.bytes.size(); ++i) {
        const std::uint8_t ctr[1] = {i};
        const Block b = sha256({as_bytes("akap-bio"), as_bytes(seed), ByteView{ctr}});
        const std::size_t n = std::min(b.bytes.size(), bio.bytes.size() - filled);
        std::copy_n(b.bytes.begin(), n, bio.bytes.begin() + static_cast<std::ptrdiff_t>(filled));
        filled += n;
    }
    return bio;
}

UserCredentials credentials(const UserArgs& u) {
    UserCredentials c{u.id, u.pw, biometric_from_seed(u.bio_seed)};
    // One flipped bit per repetition group, well inside what Rep corrects.
    for (unsigned k = 0; k < u.noise; ++k) flip_bit(c.bio.bytes, k * kRepetition);
    return c;
}

std::string fingerprint(const Block& b, bool reveal) { return reveal ? to_hex(b) : to_hex(b).substr(0, 8); }

class Deployment {
public:
    explicit Deployment(const Globals& g)
        : g_(g),
          dir_(g.state_dir),
          world_(WorldConfig{parse_seed(g.seed), g.delta, g.hash, g.quirk_double_rg}) {
        if (fs::exists(path("deployment.json"))) {
            const auto c = counters_from_json(read_text_file(path("deployment.json")));
            world_.resume(c.clock, c.rng_counter);
        }
        if (fs::exists(path("gateway.json"))) world_.install_gateway(gateway_from_json(read_text_file(path("gateway.json"))));
        for (const auto& [sid, pid] : world_.gateway().sensor_table) {
            (void)pid;
            if (fs::exists(sensor_path(sid))) world_.install_sensor(sensor_from_json(read_text_file(sensor_path(sid))));
        }
    }

    World& world() { return world_; }

    fs::path path(std::string_view name) const { return dir_ / name; }
    fs::path sensor_path(const std::string& sid) const { return path("sensor-" + sid + ".json"); }
    fs::path card_path(const std::string& id) const { return path("card-" + id + ".json"); }

    void require_plaintext_ack() const {
        if (!g_.allow_plaintext) {
            throw UsageError("state is stored unencrypted; pass --allow-plaintext-state to write it");
        }
    }

    void load_user(const UserCredentials& cred) {
        if (!fs::exists(card_path(cred.id))) throw FormatError(FormatErrc::io, "no card for user '" + cred.id + "' in " + dir_.string());
        world_.install_user(cred, card_from_json(read_text_file(card_path(cred.id))));
    }

    void save_core() {
        const AllowPlaintext ack;
        fs::create_directories(dir_);
        save_state(path("gateway.json"), world_.gateway(), ack);
        save_state(path("deployment.json"), DeploymentCounters{world_.clock(), world_.rng_counter()}, ack);
    }

    template <class State>
    void save(const fs::path& p, const State& s) {
        save_state(p, s, AllowPlaintext{});
    }

private:
    const Globals& g_;
    fs::path dir_;
    World world_;
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(g.out, text);
    }
}

int cmd_register_sensor(const Globals& g, const std::string& sid) {
    Deployment d(g);
    d.require_plaintext_ack();
    d.world().register_sensor(sid);
    d.save_core();
    d.save(d.sensor_path(sid), d.world().sensor(sid));
    std::cout << "registered sensor " << sid << "\n";
    return kOk;
}

int cmd_register_user(const Globals& g, const UserArgs& u, const std::string& sid) {
    Deployment d(g);
    d.require_plaintext_ack();
    const UserCredentials cred = credentials(u);
    if (fs::exists(d.card_path(cred.id))) {
        throw ProtocolError(ProtocolErrc::registration_rejected, "user '" + cred.id + "' already has a card");
    }
    // A user's first contact with an unknown sensor enrolls both.
    const bool new_sensor = !d.world().gateway().sensor_table.contains(sid);
    if (new_sensor) d.world().register_sensor(sid);
    d.world().register_user(cred, sid);
    d.save_core();
    if (new_sensor) d.save(d.sensor_path(sid), d.world().sensor(sid));
    d.save(d.card_path(cred.id), d.world().card(cred.id));
    std::cout << "registered user " << cred.id << " -> " << sid << (new_sensor ? " (sensor registered)" : "") << "\n";
    return kOk;
}

void print_outcome(const char* party, const std::optional<PartyOutcome>& o, bool reveal) {
    std::cout << party << ": ";
    if (!o) {
        std::cout << "no key\n";
        return;
    }
    std::cout << "sk " << fingerprint(o->sk, reveal) << (o->peer_confirmed ? " confirmed" : " unconfirmed") << "\n";
}

std::optional<Block> honest_sk(const SessionRun& run) {
    for (const auto* o : {&run.sensor_outcome, &run.gateway_outcome, &run.user_outcome}) {
        if (*o) return (*o)->sk;
    }
    return std::nullopt;
}

struct SessionArgs {
    std::string transcript;
    std::string leak_out;
    std::string card_dump;
};

int cmd_session(const Globals& g, const UserArgs& u, const SessionArgs& a) {
    Deployment d(g);
    d.require_plaintext_ack();
    const UserArgs registered{u.id, u.pw, u.bio_seed, 0};
    d.load_user(credentials(registered));
    const SessionRun run = d.world().run_auth_session(u.id, credentials(u));

    print_outcome("user", run.user_outcome, g.reveal_keys);
    print_outcome("gateway", run.gateway_outcome, g.reveal_keys);
    print_outcome("sensor", run.sensor_outcome, g.reveal_keys);

    if (!a.leak_out.empty()) write_text_file(a.leak_out, leak_to_json(d.world().leak_ephemerals(run.id), run.id));
    if (!a.card_dump.empty()) d.save(a.card_dump, d.world().dump_smart_card(u.id));
    if (!a.transcript.empty()) write_text_file(a.transcript, d.world().transcript().to_json());

    if (auto sk = honest_sk(run)) {
        std::optional<EphemeralLeak> eph;
        try {
            // Reading ground truth is not an adversary oracle use, but leak_ephemerals
            // logs one; take it from a scratch copy of the world instead.
            World scratch = d.world();
            eph = scratch.leak_ephemerals(run.id);
        } catch (const OracleUnavailable&) {
        }
        if (eph) d.save(d.path("ground-truth.json"), GroundTruth{run.id, u.id, *sk, *eph, d.world().user_truth(u.id)});
    }
    d.save_core();

    if (run.failure) {
        std::cout << "rejected by " << run.failure->party << ": " << to_string(run.failure->verdict) << " ("
                  << run.failure->check << ")\n";
        return kVerification;
    }
    if (!run.all_confirmed()) return kVerification;
    std::cout << "session " << run.id << " established\n";
    return kOk;
}

std::vector<TranscriptEntry> load_view(const std::string& path) {
    return Transcript::from_json(read_text_file(path)).public_entries();
}

GroundTruth load_truth(const Globals& g) {
    const fs::path p = fs::path(g.state_dir) / "ground-truth.json";
    if (!fs::exists(p)) throw FormatError(FormatErrc::io, "no ground truth at " + p.string() + "; run a session first");
    return truth_from_json(read_text_file(p));
}

struct AttackArgs {
    std::string transcript;
    std::string leak;
    std::string card_dump;
};

int cmd_attack(const Globals& g, const std::string& which, const AttackArgs& a) {
    const Hash h(g.hash);
    if (a.transcript.empty()) throw UsageError("--transcript is required");
    const auto view = load_view(a.transcript);
    const GroundTruth truth = load_truth(g);
    AttackReport report;
    if (which == "kssti") {
        if (a.leak.empty()) throw OracleUnavailable("kssti needs the ephemeral leak (--leak)");
        report = kssti_attack(h, view, leak_from_json(read_text_file(a.leak)), truth.sk);
    } else {
        if (a.card_dump.empty()) throw OracleUnavailable("stolen-verifier needs a smart-card dump (--card-dump)");
        report = stolen_verifier_attack(h, card_from_json(read_text_file(a.card_dump)), view, truth.user);
    }
    emit(g, report.to_json());
    if (!g.out.empty()) std::cout << report.attack << ": " << (report.success ? "success" : "failed") << "\n";
    return report.success ? kOk : kAttackFailed;
}

struct ProbeArgs {
    std::string message = "M1";
    std::string field;
    std::size_t bit = 0;
    std::optional<std::uint64_t> delay;
};

std::string probe_json(std::string_view probe, const ProbeArgs& p, const std::string& receiver, Verdict verdict,
                       const std::string& detail, std::optional<std::uint64_t> delay) {
    nlohmann::ordered_json doc;
    doc["fmt"] = "akap-probe";
    doc["v"] = 1;
    doc["probe"] = probe;
    doc["message"] = p.message;
    if (!p.field.empty()) {
        doc["field"] = p.field;
        doc["bit"] = p.bit;
    }
    if (delay) doc["delay"] = *delay;
    doc["receiver"] = receiver;
    doc["verdict"] = to_string(verdict);
    doc["detail"] = detail;
    return doc.dump(2) + "\n";
}

// Probes report what the receiver did; they assert nothing, so any verdict exits 0.
int cmd_probe(const Globals& g, const std::string& which, const UserArgs& u, const ProbeArgs& p) {
    // Run against the persisted deployment but never write it back.
    Deployment d(g);
    d.load_user(credentials(u));
    World& w = d.world();
    const MessageKind kind = *parse_message_kind(p.message);
    if (which == "tamper") {
        if (p.field.empty()) throw UsageError("--field is required for tamper");
        const auto layout = find_field(kind, p.field);
        if (!layout) throw UsageError("no Block field '" + p.field + "' in " + p.message);
        if (p.bit >= layout->length * 8) throw UsageError("--bit must be below " + std::to_string(layout->length * 8));
        AdversaryAction act;
        act.kind = ActionKind::modify;
        act.target = kind;
        act.field = p.field;
        act.bit = p.bit;
        w.adversary_act(act);
        const SessionRun run = w.run_auth_session(u.id);
        if (run.failure) {
            emit(g, probe_json(which, p, run.failure->party, run.failure->verdict, run.failure->check, std::nullopt));
        } else {
            emit(g, probe_json(which, p, World::user_name(u.id), Verdict::accepted, "", std::nullopt));
        }
        return kOk;
    }
    const SessionRun run = w.run_auth_session(u.id);
    if (!run.all_confirmed()) {
        throw ProtocolError(ProtocolErrc::authenticator_mismatch,
                            "honest session failed: " + (run.failure ? run.failure->check : std::string("unconfirmed")));
    }
    std::optional<std::uint64_t> seq;
    for (const auto& e : w.adversary_view()) {
        try {
            if (kind_of(decode(e.payload)) == kind) seq = e.seq;
        } catch (const WireError&) {
        }
    }
    if (!seq) throw OracleUnavailable("no " + p.message + " in the transcript to replay");
    AdversaryAction act;
    act.kind = ActionKind::replay;
    act.seq = *seq;
    act.delay = p.delay.value_or(g.delta + 1);
    const auto delivery = w.adversary_act(act);
    if (!delivery) throw OracleUnavailable("replay was not delivered");
    emit(g, probe_json(which, p, delivery->receiver, delivery->verdict, delivery->detail, act.delay));
    return kOk;
}

struct ClosureArgs {
    std::vector<std::string> initial;
    std::string target = "sk";
    unsigned depth = 1;
    unsigned max_arity = 5;
    std::size_t budget = 4'000'000;
    std::string transcript;
    std::string leak;
    std::string card_dump;
};

int cmd_closure(const Globals& g, const ClosureArgs& a) {
    if (a.depth > 3) throw UsageError("closure depth is capped at 3");
    const Hash h(g.hash);
    KnowledgeSet ks;
    for (const auto& src : a.initial) {
        if (src == "transcript") {
            if (a.transcript.empty()) throw UsageError("--initial transcript needs --transcript");
            const KnowledgeSet view = knowledge_from_view(load_view(a.transcript));
            for (std::size_t i = 0; i < view.size(); ++i) ks.add(view.term(i), Provenance::transcript, view.label(i));
        } else if (src == "leak") {
            if (a.leak.empty()) throw OracleUnavailable("--initial leak needs --leak");
            add_leak(ks, leak_from_json(read_text_file(a.leak)));
        } else if (src == "card") {
            if (a.card_dump.empty()) throw OracleUnavailable("--initial card needs --card-dump");
            add_card(ks, card_from_json(read_text_file(a.card_dump)));
        } else {
            throw UsageError("unknown --initial source '" + src + "'");
        }
    }
    DerivableOptions opt;
    opt.depth = a.depth;
    opt.max_arity = a.max_arity;
    opt.term_budget = a.budget;
    Bytes target;
    if (a.target == "sk") {
        const GroundTruth truth = load_truth(g);
        target.assign(truth.sk.bytes.begin(), truth.sk.bytes.end());
        opt.preimage = sk_preimage(truth.ephemerals);
    } else {
        try {
            target = from_hex(a.target);
        } catch (const std::invalid_argument&) {
            throw UsageError("--target must be 'sk' or hex");
        }
    }
    const Derivation r = derivable(h, ks, target, opt);
    emit(g, derivation_to_json(r, ks.size(), a.depth));
    if (r.derivable) return kOk;
    if (!r.complete) {
        std::cerr << "akap: closure incomplete: " << r.notice << "\n";
        return kBudget;
    }
    return kAttackFailed;
}

void add_user_options(CLI::App* cmd, UserArgs& u) {
    cmd->add_option("--id", u.id, "user identity")->required();
    cmd->add_option("--pw", u.pw, "password")->required();
    cmd->add_option("--bio-seed", u.bio_seed, "string the 640-bit biometric is derived from")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"akap: simulated IoMT user/gateway/sensor authentication with attack harness"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "world seed, 64 hex characters");
    app.add_option("--delta", g.delta, "freshness window in ticks")->check(CLI::PositiveNumber);
    app.add_option("--hash", g.hash, "hash function (sha256, sha3-256, blake2s256, sha512-256)");
    app.add_option("--state-dir", g.state_dir, "directory holding persisted party state");
    app.add_option("--out", g.out, "write the report here instead of stdout");
    app.add_flag("--quirk-double-rg", g.quirk_double_rg, "gateway hashes r_g twice into X_GS");
    app.add_flag("--allow-plaintext-state", g.allow_plaintext, "acknowledge that state files are unencrypted");
    app.add_flag("--reveal-keys", g.reveal_keys, "print full session keys instead of fingerprints");

    std::string sid;
    auto* reg_sensor = app.add_subcommand("register-sensor", "register a sensor with the gateway");
    reg_sensor->add_option("--sid", sid, "sensor identity")->required();

    UserArgs user;
    auto* reg_user = app.add_subcommand("register-user", "register a user (and the sensor, if new) and issue a smart card");
    add_user_options(reg_user, user);
    reg_user->add_option("--sid", sid, "sensor this user is routed to; registered first if unknown")->required();

    SessionArgs sess;
    auto* session = app.add_subcommand("session", "run one M1..M4 authentication");
    add_user_options(session, user);
    session->add_option("--noise", user.noise, "bits of biometric noise at login")->check(CLI::Range(0u, 128u));
    session->add_option("--transcript", sess.transcript, "write the transcript here");
    session->add_option("--leak-out", sess.leak_out, "use the ephemeral leak oracle and write its output here");
    session->add_option("--card-dump", sess.card_dump, "use the smart-card dump oracle and write its output here");

    std::string attack_kind;
    AttackArgs atk;
    auto* attack = app.add_subcommand("attack", "run an attack against a recorded session");
    attack->add_option("kind", attack_kind, "kssti | stolen-verifier")
        ->required()
        ->check(CLI::IsMember({"kssti", "stolen-verifier"}));
    attack->add_option("--transcript", atk.transcript, "recorded transcript")->required();
    attack->add_option("--leak", atk.leak, "ephemeral leak artifact");
    attack->add_option("--card-dump", atk.card_dump, "smart-card dump artifact");

    std::string probe_kind;
    ProbeArgs prb;
    auto* probe = app.add_subcommand("probe", "replay or tamper with a frame and report the receiver's verdict");
    probe->add_option("kind", probe_kind, "replay | tamper")->required()->check(CLI::IsMember({"replay", "tamper"}));
    add_user_options(probe, user);
    probe->add_option("--message", prb.message, "M1..M4")->check(CLI::IsMember({"M1", "M2", "M3", "M4"}));
    probe->add_option("--field", prb.field, "Block field to flip (tamper)");
    probe->add_option("--bit", prb.bit, "bit index within the field (tamper)");
    probe->add_option("--delay", prb.delay, "ticks before the replay lands (default delta+1)");

    ClosureArgs clo;
    auto* closure_cmd = app.add_subcommand("closure", "is a target derivable from attacker knowledge?");
    closure_cmd->add_option("--initial", clo.initial, "knowledge sources: transcript, leak, card")
        ->required()
        ->delimiter(',');
    closure_cmd->add_option("--target", clo.target, "'sk' (from ground truth) or a hex value");
    closure_cmd->add_option("--depth", clo.depth, "rule applications, at most 3");
    closure_cmd->add_option("--max-arity", clo.max_arity, "largest hashed tuple")->check(CLI::Range(1u, 5u));
    closure_cmd->add_option("--budget", clo.budget, "term budget");
    closure_cmd->add_option("--transcript", clo.transcript, "recorded transcript");
    closure_cmd->add_option("--leak", clo.leak, "ephemeral leak artifact");
    closure_cmd->add_option("--card-dump", clo.card_dump, "smart-card dump artifact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (reg_sensor->parsed()) return cmd_register_sensor(g, sid);
        if (reg_user->parsed()) return cmd_register_user(g, user, sid);
        if (session->parsed()) return cmd_session(g, user, sess);
        if (attack->parsed()) return cmd_attack(g, attack_kind, atk);
        if (probe->parsed()) return cmd_probe(g, probe_kind, user, prb);
        if (closure_cmd->parsed()) return cmd_closure(g, clo);
    } catch (const UsageError& e) {
        std::cerr << "akap: " << e.what() << "\n";
        return kUsage;
    } catch (const ProtocolError& e) {
        std::cerr << "akap: " << to_string(e.code()) << ": " << e.check() << "\n";
        return e.code() == ProtocolErrc::registration_rejected ? kRejected : kVerification;
    } catch (const FormatError& e) {
        std::cerr << "akap: " << to_string(e.code()) << ": " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "akap: io: " << e.what() << "\n";
        return kIo;
    } catch (const OracleUnavailable& e) {
        std::cerr << "akap: missing oracle: " << e.what() << "\n";
        return kNoOracle;
    } catch (const AttackInputsMissing& e) {
        std::cerr << "akap: missing oracle: " << e.what() << "\n";
        return kNoOracle;
    } catch (const std::invalid_argument& e) {
        std::cerr << "akap: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
