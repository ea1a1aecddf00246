#include "akap/knowledge.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace akap {

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::transcript: return "transcript";
        case Provenance::leak: return "leak";
        case Provenance::card_dump: return "card-dump";
        case Provenance::derived: return "derived";
    }
    return "unknown";
}

std::string_view to_string(Rule r) noexcept {
    switch (r) {
        case Rule::initial: return "initial";
        case Rule::xor_pair: return "R1";
        case Rule::hash_tuple: return "R2";
    }
    return "unknown";
}

namespace {

std::uint64_t term_hash(ByteView t) noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL ^ t.size();
    std::size_t i = 0;
    for (; i + 8 <= t.size() && i < 32; i += 8) {
        std::uint64_t chunk;
        std::memcpy(&chunk, t.data() + i, 8);
        h = (h ^ chunk) * 0x9e3779b97f4a7c15ULL;
        h ^= h >> 29;
    }
    for (; i < t.size() && i < 40; ++i) h = (h ^ t[i]) * 0x100000001b3ULL;
    return h ^ (h >> 32);
}

bool same(ByteView a, ByteView b) noexcept {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Saturating a + b, a * b for the level-size estimate.
std::size_t sat_add(std::size_t a, std::size_t b) {
    return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}
std::size_t sat_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    return a * b;
}

std::size_t tuple_count(std::size_t n, unsigned max_arity) {
    std::size_t total = 0, power = 1;
    for (unsigned k = 1; k <= max_arity; ++k) {
        power = sat_mul(power, n);
        total = sat_add(total, power);
    }
    return total;
}

std::vector<std::uint32_t> block_indices(const KnowledgeSet& s, std::size_t n) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.info(i).length == Block::size) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
}

// Visits every ordered tuple over [0, n) of length 1..max_arity, in
// lexicographic order per length, together with the hash of the tuple's
// concatenated terms. Stops early when visit returns false.
template <class F>
void for_each_tuple_digest(const Hash& h, const KnowledgeSet& s, std::size_t n, unsigned max_arity, F&& visit) {
    if (n == 0) return;
    std::array<std::uint32_t, kMaxArity> idx{};
    std::vector<HashState> states(max_arity, HashState(h));  // states[d]: first d terms absorbed
    bool stop = false;
    auto rec = [&](auto&& self, unsigned d, unsigned k) -> void {
        for (std::size_t i = 0; i < n && !stop; ++i) {
            idx[d] = static_cast<std::uint32_t>(i);
            if (d + 1 == k) {
                const Block digest = states[d].peek(s.term(i));
                if (!visit(std::span<const std::uint32_t>(idx.data(), k), digest)) stop = true;
            } else {
                states[d + 1] = states[d];
                states[d + 1].update(s.term(i));
                self(self, d + 1, k);
            }
        }
    };
    for (unsigned k = 1; k <= max_arity && !stop; ++k) rec(rec, 0, k);
}

void validate(unsigned depth, unsigned max_arity) {
    if (depth > 3) throw std::invalid_argument("closure depth must be <= 3");
    if (max_arity < 1 || max_arity > kMaxArity) throw std::invalid_argument("max arity must be in 1..5");
}

}  // namespace

void KnowledgeSet::reserve(std::size_t terms, std::size_t bytes) {
    terms_.reserve(terms);
    arena_.reserve(bytes);
    std::size_t want = 64;
    while (want < terms * 2) want <<= 1;
    if (want > slots_.size()) rehash(want);
}

void KnowledgeSet::rehash(std::size_t capacity) {
    slots_.assign(capacity, 0);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const std::uint64_t hv = term_hash(term(i));
        slots_[slot_for(term(i), hv)] = (hv << 32) | (i + 1);
    }
}

void KnowledgeSet::grow() { rehash(slots_.empty() ? 64 : slots_.size() * 2); }

std::size_t KnowledgeSet::slot_for(ByteView t, std::uint64_t hv) const noexcept {
    const std::size_t mask = slots_.size() - 1;
    const std::uint64_t tag = hv << 32;
    std::size_t pos = hv & mask;
    while (true) {
        const std::uint64_t v = slots_[pos];
        if (v == 0) return pos;
        if ((v & 0xffffffff00000000ULL) == tag && same(term((v & 0xffffffffULL) - 1), t)) return pos;
        pos = (pos + 1) & mask;
    }
}

std::optional<std::size_t> KnowledgeSet::find(ByteView t) const noexcept {
    if (slots_.empty()) return std::nullopt;
    const std::uint64_t v = slots_[slot_for(t, term_hash(t))];
    if (v == 0) return std::nullopt;
    return (v & 0xffffffffULL) - 1;
}

std::size_t KnowledgeSet::insert_raw(ByteView t) {
    if ((terms_.size() + 1) * 2 > slots_.size()) grow();
    return insert_hashed(t, term_hash(t));
}

std::size_t KnowledgeSet::insert_hashed(ByteView t, std::uint64_t hv) {
    if (t.size() > std::numeric_limits<std::uint16_t>::max()) throw std::invalid_argument("term too long");
    const std::size_t slot = slot_for(t, hv);
    if (slots_[slot] != 0) return (slots_[slot] & 0xffffffffULL) - 1;
    if (arena_.size() + t.size() > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("term arena full");
    TermInfo info{};
    info.offset = static_cast<std::uint32_t>(arena_.size());
    info.length = static_cast<std::uint16_t>(t.size());
    arena_.insert(arena_.end(), t.begin(), t.end());
    terms_.push_back(info);
    slots_[slot] = (hv << 32) | terms_.size();
    return terms_.size() - 1;
}

void KnowledgeSet::add_derived_batch(std::span<const PendingBlock> batch) {
    if ((terms_.size() + batch.size()) * 2 > slots_.size()) reserve(terms_.size() + batch.size(), 0);
    std::array<std::uint64_t, 64> hashes;
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t base = 0; base < batch.size(); base += hashes.size()) {
        const std::size_t n = std::min(hashes.size(), batch.size() - base);
        for (std::size_t i = 0; i < n; ++i) {
            hashes[i] = term_hash(batch[base + i].value.view());
            __builtin_prefetch(&slots_[hashes[i] & mask]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const PendingBlock& pb = batch[base + i];
            const std::size_t before = terms_.size();
            if (insert_hashed(pb.value.view(), hashes[i]) != before) continue;
            TermInfo& info = terms_[before];
            info.provenance = Provenance::derived;
            info.rule = pb.rule;
            info.arity = pb.arity;
            info.parents = pb.parents;
        }
    }
}

void KnowledgeSet::find_batch(std::span<const Block> queries, std::span<std::size_t> out) const {
    std::array<std::uint64_t, 64> hashes;
    const std::size_t mask = slots_.empty() ? 0 : slots_.size() - 1;
    for (std::size_t base = 0; base < queries.size(); base += hashes.size()) {
        const std::size_t n = std::min(hashes.size(), queries.size() - base);
        for (std::size_t i = 0; i < n; ++i) {
            hashes[i] = term_hash(queries[base + i].view());
            if (!slots_.empty()) __builtin_prefetch(&slots_[hashes[i] & mask]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = SIZE_MAX;
            if (!slots_.empty()) {
                const std::uint64_t v = slots_[slot_for(queries[base + i].view(), hashes[i])];
                if (v != 0) r = (v & 0xffffffffULL) - 1;
            }
            out[base + i] = r;
        }
    }
}

std::size_t KnowledgeSet::add(ByteView t, Provenance provenance, std::string label) {
    const std::size_t before = terms_.size();
    const std::size_t i = insert_raw(t);
    if (i == before) {
        terms_[i].provenance = provenance;
        terms_[i].rule = Rule::initial;
        labels_.emplace_back(static_cast<std::uint32_t>(i), std::move(label));
    }
    return i;
}

bool KnowledgeSet::add_derived(ByteView t, Rule rule, std::span<const std::uint32_t> parents) {
    const std::size_t before = terms_.size();
    const std::size_t i = insert_raw(t);
    if (i != before) return false;
    TermInfo& info = terms_[i];
    info.provenance = Provenance::derived;
    info.rule = rule;
    info.arity = static_cast<std::uint8_t>(parents.size());
    std::copy(parents.begin(), parents.end(), info.parents.begin());
    return true;
}

std::string KnowledgeSet::label(std::size_t i) const {
    for (const auto& [idx, name] : labels_) {
        if (idx == i) return name;
    }
    return {};
}

std::vector<TraceStep> KnowledgeSet::trace(std::size_t root) const {
    std::vector<TraceStep> out;
    std::unordered_set<std::size_t> done;
    // Iterative post-order: (index, expanded?)
    std::vector<std::pair<std::size_t, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [i, expanded] = stack.back();
        stack.pop_back();
        if (done.contains(i)) continue;
        const TermInfo& inf = terms_[i];
        if (!expanded && inf.rule != Rule::initial) {
            stack.emplace_back(i, true);
            for (std::size_t p = 0; p < inf.arity; ++p) stack.emplace_back(inf.parents[p], false);
            continue;
        }
        done.insert(i);
        TraceStep step;
        step.rule = std::string(to_string(inf.rule));
        step.result = to_hex(term(i));
        for (std::size_t p = 0; p < inf.arity; ++p) step.parents.push_back(to_hex(term(inf.parents[p])));
        if (inf.rule == Rule::initial) step.label = label(i);
        out.push_back(std::move(step));
    }
    return out;
}

ClosureResult closure(const Hash& h, KnowledgeSet initial, const ClosureOptions& opt) {
    validate(opt.depth, opt.max_arity);
    ClosureResult res{std::move(initial), true, 0, {}};
    KnowledgeSet& s = res.set;
    for (unsigned level = 0; level < opt.depth; ++level) {
        const std::size_t n = s.size();
        const auto blocks = block_indices(s, n);
        const std::size_t bound =
            sat_add(sat_add(s.size(), blocks.size() * (blocks.size() + 1) / 2), tuple_count(n, opt.max_arity));
        if (bound > opt.term_budget) {
            res.complete = false;
            res.notice = "partial closure: level " + std::to_string(level + 1) + " could add up to " +
                         std::to_string(bound - s.size()) + " terms, budget is " + std::to_string(opt.term_budget);
            return res;
        }
        s.reserve(bound, bound * Block::size);
        std::vector<KnowledgeSet::PendingBlock> pending;
        pending.reserve(4096);
        auto flush = [&] {
            s.add_derived_batch(pending);
            pending.clear();
        };
        for (std::size_t a = 0; a < blocks.size(); ++a) {
            for (std::size_t b = a; b < blocks.size(); ++b) {
                KnowledgeSet::PendingBlock pb{};
                pb.value = Block::from(s.term(blocks[a])) ^ Block::from(s.term(blocks[b]));
                pb.rule = Rule::xor_pair;
                pb.arity = 2;
                pb.parents[0] = blocks[a];
                pb.parents[1] = blocks[b];
                pending.push_back(pb);
            }
        }
        flush();
        for_each_tuple_digest(h, s, n, opt.max_arity, [&](std::span<const std::uint32_t> tuple, const Block& d) {
            KnowledgeSet::PendingBlock pb{};
            pb.value = d;
            pb.rule = Rule::hash_tuple;
            pb.arity = static_cast<std::uint8_t>(tuple.size());
            std::copy(tuple.begin(), tuple.end(), pb.parents.begin());
            pending.push_back(pb);
            if (pending.size() == 4096) flush();
            return true;
        });
        flush();
        res.levels = level + 1;
    }
    return res;
}

Derivation derivable(const Hash& h, const KnowledgeSet& initial, ByteView target, const DerivableOptions& opt) {
    validate(opt.depth, opt.max_arity);
    if (opt.preimage && h.digest(*opt.preimage) != Block::from(target)) {
        throw std::invalid_argument("preimage hint does not hash to the target");
    }
    Derivation out;
    if (opt.depth == 0) {
        if (auto i = initial.find(target)) {
            out.derivable = true;
            out.trace = initial.trace(*i);
        }
        return out;
    }

    ClosureResult base = closure(h, initial, {opt.depth - 1, opt.max_arity, opt.term_budget});
    if (!base.complete) {
        out.complete = false;
        out.notice = base.notice;
        return out;
    }
    KnowledgeSet& s = base.set;
    if (auto i = s.find(target)) {
        out.derivable = true;
        out.trace = s.trace(*i);
        return out;
    }

    auto finish = [&](Rule rule, std::span<const std::uint32_t> parents) {
        s.add_derived(target, rule, parents);
        out.derivable = true;
        out.trace = s.trace(*s.find(target));
        return out;
    };

    // Last level, R1: target = x ^ y with x, y known.
    if (target.size() == Block::size) {
        const Block t = Block::from(target);
        std::vector<Block> queries;
        std::vector<std::uint32_t> sources;
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < s.size(); i += 4096) {
            queries.clear();
            sources.clear();
            for (std::size_t k = i; k < std::min(s.size(), i + 4096); ++k) {
                if (s.info(k).length != Block::size) continue;
                queries.push_back(t ^ Block::from(s.term(k)));
                sources.push_back(static_cast<std::uint32_t>(k));
            }
            hits.resize(queries.size());
            s.find_batch(queries, hits);
            for (std::size_t q = 0; q < hits.size(); ++q) {
                if (hits[q] == SIZE_MAX) continue;
                const std::array<std::uint32_t, 2> parents{sources[q], static_cast<std::uint32_t>(hits[q])};
                return finish(Rule::xor_pair, parents);
            }
        }
    }

    // Last level, R2.
    if (opt.preimage) {
        const Bytes& pre = *opt.preimage;
        std::set<std::size_t> lengths;
        for (std::size_t i = 0; i < s.size(); ++i) lengths.insert(s.info(i).length);
        constexpr unsigned kUnreached = std::numeric_limits<unsigned>::max();
        std::vector<unsigned> parts(pre.size() + 1, kUnreached);
        std::vector<std::pair<std::size_t, std::uint32_t>> back(pre.size() + 1);  // (prev pos, term)
        parts[0] = 0;
        for (std::size_t pos = 0; pos < pre.size(); ++pos) {
            if (parts[pos] == kUnreached || parts[pos] >= opt.max_arity) continue;
            for (std::size_t len : lengths) {
                if (len == 0 || pos + len > pre.size()) continue;
                auto j = s.find(ByteView(pre).subspan(pos, len));
                if (j && parts[pos] + 1 < parts[pos + len]) {
                    parts[pos + len] = parts[pos] + 1;
                    back[pos + len] = {pos, static_cast<std::uint32_t>(*j)};
                }
            }
        }
        if (parts[pre.size()] != kUnreached && parts[pre.size()] <= opt.max_arity) {
            std::vector<std::uint32_t> tuple;
            for (std::size_t pos = pre.size(); pos > 0; pos = back[pos].first) tuple.push_back(back[pos].second);
            std::reverse(tuple.begin(), tuple.end());
            return finish(Rule::hash_tuple, tuple);
        }
        return out;
    }

    const std::size_t tuples = tuple_count(s.size(), opt.max_arity);
    if (sat_add(s.size(), tuples) > opt.term_budget) {
        out.complete = false;
        out.notice = "partial closure: final level needs " + std::to_string(tuples) +
                     " hash evaluations, budget is " + std::to_string(opt.term_budget) +
                     "; supply a preimage hint for the target";
        return out;
    }
    const Block t = Block::from(target);
    std::vector<std::uint32_t> hit;
    for_each_tuple_digest(h, s, s.size(), opt.max_arity, [&](std::span<const std::uint32_t> tuple, const Block& d) {
        if (d == t) {
            hit.assign(tuple.begin(), tuple.end());
            return false;
        }
        return true;
    });
    if (!hit.empty()) return finish(Rule::hash_tuple, hit);
    return out;
}

bool replay_trace(const Hash& h, const KnowledgeSet& initial, std::span<const TraceStep> trace) {
    std::set<std::string> known;
    for (const auto& step : trace) {
        Bytes result;
        try {
            result = from_hex(step.result);
        } catch (const std::invalid_argument&) {
            return false;
        }
        if (step.rule == "initial") {
            if (!initial.contains(result)) return false;
        } else {
            std::vector<Bytes> parents;
            for (const auto& p : step.parents) {
                if (!known.contains(p)) return false;
                parents.push_back(from_hex(p));
            }
            if (step.rule == "R1") {
                if (parents.size() != 2 || parents[0].size() != Block::size || parents[1].size() != Block::size) {
                    return false;
                }
                if (result.size() != Block::size ||
                    (Block::from(parents[0]) ^ Block::from(parents[1])) != Block::from(result)) {
                    return false;
                }
            } else if (step.rule == "R2") {
                if (parents.empty() || parents.size() > kMaxArity) return false;
                std::vector<ByteView> views(parents.begin(), parents.end());
                if (result.size() != Block::size || h(std::span<const ByteView>(views)) != Block::from(result)) {
                    return false;
                }
            } else {
                return false;
            }
        }
        known.insert(step.result);
    }
    return !trace.empty();
}

}  // namespace akap
