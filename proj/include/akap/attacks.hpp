#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "akap/knowledge.hpp"
#include "akap/netsim.hpp"

namespace akap {

struct AttackReport {
    std::string attack;
    bool success{false};
    std::vector<std::pair<std::string, Block>> recovered;
    std::vector<TraceStep> trace;
    std::vector<std::string> assumptions;
    std::string note;

    // {"fmt":"akap-attack-report","v":1,...}, Blocks as hex.
    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] static AttackReport from_json(std::string_view text);

    friend bool operator==(const AttackReport&, const AttackReport&) = default;
};

class AttackInputsMissing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Known session-specific temporary information: SK = h(r_u||r_g||r_s) depends
// on nothing but the three ephemerals and the public hash, so leaking them
// yields the key. Success is adjudicated against `honest_sk` taken from party
// state, never against the attack's own computation.
[[nodiscard]] AttackReport kssti_attack(const Hash& h, std::span<const TranscriptEntry> view,
                                        const EphemeralLeak& leak, const Block& honest_sk);

// Smart-card verifier theft: with the card's M and an intercepted HID_i,
// h(N||r1) = HID_i ^ M, from which M' = h(N||r1) ^ HID_i passes the card's
// M' == M check. Success requires the recovered h(N||r1) to be the observed
// user's true value. Throws AttackInputsMissing if the view holds no M1.
[[nodiscard]] AttackReport stolen_verifier_attack(const Hash& h, const SmartCardStore& card,
                                                  std::span<const TranscriptEntry> view, const UserTruth& truth);

// Attacker knowledge built from oracle outputs. Transcript knowledge holds
// every Block field and timestamp of the decodable M1..M4 frames in the view.
[[nodiscard]] KnowledgeSet knowledge_from_view(std::span<const TranscriptEntry> view);
void add_leak(KnowledgeSet& ks, const EphemeralLeak& leak);
void add_card(KnowledgeSet& ks, const SmartCardStore& card);

// {"fmt":"akap-derivation","v":1,...} for a derivable() answer.
[[nodiscard]] std::string derivation_to_json(const Derivation& d, std::size_t initial_terms, unsigned depth);

// r_u || r_g || r_s, the preimage of SK, for derivable()'s hint.
[[nodiscard]] Bytes sk_preimage(const EphemeralLeak& ephemerals);

}  // namespace akap
