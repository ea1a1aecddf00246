#include "akap/attacks.hpp"

#include "json_util.hpp"

namespace akap {

using nlohmann::ordered_json;

namespace {

std::optional<M1> last_m1(std::span<const TranscriptEntry> view) {
    std::optional<M1> found;
    for (const auto& e : view) {
        if (e.channel != Channel::public_channel) continue;
        try {
            WireMessage msg = decode(e.payload);
            if (auto* m = std::get_if<M1>(&msg)) found = *m;
        } catch (const WireError&) {
            // Garbage on the wire is not an M1.
        }
    }
    return found;
}

TraceStep step(std::string rule, std::vector<std::string> parents, const Block& result, std::string label = {}) {
    return TraceStep{std::move(rule), std::move(parents), to_hex(result), std::move(label)};
}

ordered_json trace_json(std::span<const TraceStep> trace) {
    ordered_json tr = ordered_json::array();
    for (const auto& s : trace) {
        ordered_json j;
        j["rule"] = s.rule;
        j["parents"] = s.parents;
        j["result"] = s.result;
        if (!s.label.empty()) j["label"] = s.label;
        tr.push_back(std::move(j));
    }
    return tr;
}

}  // namespace

AttackReport kssti_attack(const Hash& h, std::span<const TranscriptEntry> view, const EphemeralLeak& leak,
                          const Block& honest_sk) {
    AttackReport r;
    r.attack = "kssti";
    const Block candidate = derive_sk(h, leak.r_u, leak.r_g, leak.r_s);
    r.success = candidate == honest_sk;
    r.recovered = {{"sk", candidate}};
    r.trace = {
        step("initial", {}, leak.r_u, "leak.r_u"),
        step("initial", {}, leak.r_g, "leak.r_g"),
        step("initial", {}, leak.r_s, "leak.r_s"),
        step("R2", {to_hex(leak.r_u), to_hex(leak.r_g), to_hex(leak.r_s)}, candidate),
    };
    r.assumptions = {"ephemeral leak oracle: r_u, r_g, r_s", "public hash function h"};
    r.note = "SK = h(r_u||r_g||r_s) depends only on the session ephemerals and the public hash; " +
             std::to_string(view.size()) + " intercepted public frames were not needed";
    return r;
}

AttackReport stolen_verifier_attack(const Hash& h, const SmartCardStore& card, std::span<const TranscriptEntry> view,
                                    const UserTruth& truth) {
    (void)h;
    const auto m1 = last_m1(view);
    if (!m1) throw AttackInputsMissing("no M1 in the intercepted traffic; HID_i unavailable");
    AttackReport r;
    r.attack = "stolen-verifier";
    const Block hid = m1->hid;
    const Block h_n_r1 = hid ^ card.m;  // self-inverse: M = h(N||r1) ^ HID_i
    const Block forged = h_n_r1 ^ hid;
    r.success = forged == card.m && h_n_r1 == truth.h_n_r1 && hid == truth.hid;
    r.recovered = {{"HID_i", hid}, {"h(N||r1)", h_n_r1}, {"M_prime", forged}};
    r.trace = {
        step("initial", {}, hid, "M1.hid"),
        step("initial", {}, card.m, "card.M"),
        step("R1", {to_hex(hid), to_hex(card.m)}, h_n_r1),
        step("R1", {to_hex(h_n_r1), to_hex(hid)}, forged),
    };
    r.assumptions = {"smart-card dump oracle: D1, D3, D4, Omega, M, tau", "public channel intercept: HID_i from M1"};
    r.note =
        "the stolen verifiers are the user's smart-card values, not a server-side verifier table; the forged M' "
        "is checked against the card's M' == M test only";
    return r;
}

KnowledgeSet knowledge_from_view(std::span<const TranscriptEntry> view) {
    KnowledgeSet ks;
    for (const auto& e : view) {
        if (e.channel != Channel::public_channel) continue;
        MessageKind kind;
        try {
            kind = kind_of(decode(e.payload));
        } catch (const WireError&) {
            continue;
        }
        const auto fields = block_fields(kind);
        if (fields.empty()) continue;
        const std::string prefix = std::string(to_string(kind)) + ".";
        for (const auto& f : fields) {
            ks.add(ByteView(e.payload).subspan(f.offset, f.length), Provenance::transcript, prefix + std::string(f.name));
        }
        ks.add(ByteView(e.payload).last(8), Provenance::transcript, prefix + "t");
    }
    return ks;
}

void add_leak(KnowledgeSet& ks, const EphemeralLeak& leak) {
    ks.add(leak.r_u, Provenance::leak, "leak.r_u");
    ks.add(leak.r_g, Provenance::leak, "leak.r_g");
    ks.add(leak.r_s, Provenance::leak, "leak.r_s");
}

void add_card(KnowledgeSet& ks, const SmartCardStore& card) {
    ks.add(card.d1, Provenance::card_dump, "card.D1");
    ks.add(card.d3, Provenance::card_dump, "card.D3");
    ks.add(card.d4, Provenance::card_dump, "card.D4");
    ks.add(card.omega, Provenance::card_dump, "card.Omega");
    ks.add(card.m, Provenance::card_dump, "card.M");
    ks.add(card.tau, Provenance::card_dump, "card.tau");
}

std::string derivation_to_json(const Derivation& d, std::size_t initial_terms, unsigned depth) {
    ordered_json doc;
    doc["fmt"] = "akap-derivation";
    doc["v"] = 1;
    doc["initial_terms"] = initial_terms;
    doc["depth"] = depth;
    doc["derivable"] = d.derivable;
    doc["complete"] = d.complete;
    if (!d.notice.empty()) doc["notice"] = d.notice;
    doc["trace"] = trace_json(d.trace);
    return doc.dump(2) + "\n";
}

Bytes sk_preimage(const EphemeralLeak& e) {
    Bytes out;
    for (const Block* b : {&e.r_u, &e.r_g, &e.r_s}) out.insert(out.end(), b->bytes.begin(), b->bytes.end());
    return out;
}

std::string AttackReport::to_json() const {
    ordered_json doc;
    doc["fmt"] = "akap-attack-report";
    doc["v"] = 1;
    doc["attack"] = attack;
    doc["success"] = success;
    ordered_json rec = ordered_json::array();
    for (const auto& [name, value] : recovered) rec.push_back({{"name", name}, {"value", to_hex(value)}});
    doc["recovered"] = rec;
    doc["trace"] = trace_json(trace);
    doc["assumptions"] = assumptions;
    doc["note"] = note;
    return doc.dump(2) + "\n";
}

AttackReport AttackReport::from_json(std::string_view text) {
    using namespace detail;
    const json doc = parse_json(text);
    check_header(doc, "akap-attack-report");
    AttackReport r;
    r.attack = string_field(doc, "attack");
    const json& success = member(doc, "success");
    if (!success.is_boolean()) throw FormatError(FormatErrc::malformed_json, "success must be boolean");
    r.success = success.get<bool>();
    for (const auto& j : member(doc, "recovered")) r.recovered.emplace_back(string_field(j, "name"), block_field(j, "value"));
    for (const auto& j : member(doc, "trace")) {
        TraceStep s;
        s.rule = string_field(j, "rule");
        for (const auto& p : member(j, "parents")) {
            if (!p.is_string()) throw FormatError(FormatErrc::malformed_json, "trace parents must be strings");
            s.parents.push_back(p.get<std::string>());
        }
        s.result = string_field(j, "result");
        if (j.contains("label")) s.label = string_field(j, "label");
        r.trace.push_back(std::move(s));
    }
    for (const auto& a : member(doc, "assumptions")) {
        if (!a.is_string()) throw FormatError(FormatErrc::malformed_json, "assumptions must be strings");
        r.assumptions.push_back(a.get<std::string>());
    }
    r.note = string_field(doc, "note");
    return r;
}

}  // namespace akap
