#pragma once

#include <utility>

#include "akap/bytes.hpp"
#include "akap/rng.hpp"

namespace akap {

// Code-offset fuzzy extractor over a 5x repetition code.
// sigma is 128 bits; each sigma bit occupies one 5-bit group of the 640-bit
// reading, MSB first. Rep tolerates up to 2 flipped bits per group.
inline constexpr std::size_t kRepetition = 5;
inline constexpr std::size_t kSigmaBits = Sigma::size * 8;

static_assert(kSigmaBits * kRepetition == Biometric::size * 8);

struct FuzzyOutput {
    Sigma sigma;
    HelperData tau;
};

[[nodiscard]] HelperData repetition_encode(const Sigma& sigma);

// Gen: sigma is the first 16 bytes of the next rng block.
[[nodiscard]] FuzzyOutput gen_fuzzy(const Biometric& bio, SeededRng& rng);

// Rep: majority-decodes each group of (tau xor bio'). Never fails; a reading
// that is too noisy simply yields a different sigma.
[[nodiscard]] Sigma rep_fuzzy(const Biometric& bio_prime, const HelperData& tau);

// Bit helpers shared with tests and the netsim noise model (MSB-first indexing).
[[nodiscard]] bool get_bit(ByteView data, std::size_t index);
void flip_bit(std::span<std::uint8_t> data, std::size_t index);

}  // namespace akap
