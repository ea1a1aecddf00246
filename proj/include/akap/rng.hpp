#pragma once

#include <cstdint>

#include "akap/bytes.hpp"

namespace akap {

// Counter-mode stream: block_i = SHA-256("akap-rng" || seed || be64(i)).
// Every ephemeral value in the simulation comes from one of these, so a run
// is reproducible from its seed alone.
class SeededRng {
public:
    explicit SeededRng(const Block& seed, std::uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    [[nodiscard]] Block next_block();

    [[nodiscard]] const Block& seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    Block seed_;
    std::uint64_t counter_{0};
};

// Seed given as 64 hex characters.
[[nodiscard]] Block parse_seed(std::string_view hex);

// Convenience for tests and sweeps: seed whose last 8 bytes are be64(n).
[[nodiscard]] Block seed_from_index(std::uint64_t n);

}  // namespace akap
