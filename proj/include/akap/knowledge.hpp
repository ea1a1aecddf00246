#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "akap/bytes.hpp"
#include "akap/hash.hpp"

namespace akap {

enum class Provenance : std::uint8_t { transcript, leak, card_dump, derived };
enum class Rule : std::uint8_t { initial, xor_pair, hash_tuple };

[[nodiscard]] std::string_view to_string(Provenance p) noexcept;
[[nodiscard]] std::string_view to_string(Rule r) noexcept;

inline constexpr std::size_t kMaxArity = 5;

// One step of a derivation: result = rule(parents...). Values are hex.
struct TraceStep {
    std::string rule;  // "R1" (xor), "R2" (hash) or "initial"
    std::vector<std::string> parents;
    std::string result;
    std::string label;  // initial terms only
    friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

// Set of attacker-known terms (Blocks and raw byte strings). Every term
// remembers how it entered the set, so derivations form an auditable DAG.
// Terms live in one arena and are indexed by an open-addressing table, since
// a depth-1 closure over a transcript already holds ~1.5M terms.
class KnowledgeSet {
public:
    struct TermInfo {
        std::uint32_t offset;
        std::uint16_t length;
        Provenance provenance;
        Rule rule;
        std::uint8_t arity;
        std::array<std::uint32_t, kMaxArity> parents;
    };

    // Initial term; returns its index (the existing one for duplicates).
    std::size_t add(ByteView term, Provenance provenance, std::string label);
    template <std::size_t N>
    std::size_t add(const FixedBytes<N>& term, Provenance provenance, std::string label) {
        return add(term.view(), provenance, std::move(label));
    }

    // Derived term; no-op when already known. Returns true if new.
    bool add_derived(ByteView term, Rule rule, std::span<const std::uint32_t> parents);

    struct PendingBlock {
        Block value;
        Rule rule;
        std::uint8_t arity;
        std::array<std::uint32_t, kMaxArity> parents;
    };
    // Inserts many derived Blocks, prefetching their slots first. Capacity
    // must have been reserved for all of them.
    void add_derived_batch(std::span<const PendingBlock> batch);
    // find() for many Blocks at once; out[i] is SIZE_MAX when absent.
    void find_batch(std::span<const Block> queries, std::span<std::size_t> out) const;

    [[nodiscard]] std::optional<std::size_t> find(ByteView term) const noexcept;
    [[nodiscard]] bool contains(ByteView term) const noexcept { return find(term).has_value(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] ByteView term(std::size_t i) const noexcept {
        return {arena_.data() + terms_[i].offset, terms_[i].length};
    }
    [[nodiscard]] const TermInfo& info(std::size_t i) const noexcept { return terms_[i]; }
    [[nodiscard]] std::string label(std::size_t i) const;

    // Derivation of term i in dependency order (parents before children).
    [[nodiscard]] std::vector<TraceStep> trace(std::size_t i) const;

    void reserve(std::size_t terms, std::size_t bytes);

private:
    std::size_t insert_raw(ByteView term);
    std::size_t insert_hashed(ByteView term, std::uint64_t hash);
    void grow();
    void rehash(std::size_t capacity);
    [[nodiscard]] std::size_t slot_for(ByteView term, std::uint64_t hash) const noexcept;

    Bytes arena_;
    std::vector<TermInfo> terms_;
    // (fingerprint << 32) | (index + 1); 0 = empty
    std::vector<std::uint64_t> slots_;
    std::vector<std::pair<std::uint32_t, std::string>> labels_;
};

struct ClosureOptions {
    unsigned depth = 1;
    unsigned max_arity = 5;
    std::size_t term_budget = 4'000'000;
};

struct ClosureResult {
    KnowledgeSet set;
    bool complete{true};
    unsigned levels{0};  // levels fully applied
    std::string notice;  // why the closure stopped early
};

// Saturates under R1 (xor of two known Blocks) and R2 (hash of an ordered
// tuple of 1..max_arity known terms), `depth` times. A level is only started
// if the budget covers every term it could add; otherwise the result comes
// back flagged incomplete. Throws std::invalid_argument if depth > 3 or the
// arity is outside 1..5.
[[nodiscard]] ClosureResult closure(const Hash& h, KnowledgeSet initial, const ClosureOptions& opt);

struct DerivableOptions {
    unsigned depth = 1;
    unsigned max_arity = 5;
    std::size_t term_budget = 4'000'000;
    // Known preimage of the target (e.g. r_u||r_g||r_s for SK). With it, the
    // last R2 level is decided by splitting the preimage into known terms
    // instead of enumerating every tuple; the hash is taken as collision
    // resistant. Must hash to the target.
    std::optional<Bytes> preimage;
};

struct Derivation {
    bool derivable{false};
    bool complete{true};
    std::vector<TraceStep> trace;
    std::string notice;
};

// target in closure(initial, depth)? The last level is tested on demand
// rather than materialized.
[[nodiscard]] Derivation derivable(const Hash& h, const KnowledgeSet& initial, ByteView target,
                                   const DerivableOptions& opt);

// Re-executes a trace: every step's result must follow from its parents by
// its rule, with parents either earlier results or `initial` terms.
[[nodiscard]] bool replay_trace(const Hash& h, const KnowledgeSet& initial, std::span<const TraceStep> trace);

}  // namespace akap
