#include "akap/fuzzy.hpp"

#include <stdexcept>

namespace akap {

bool get_bit(ByteView data, std::size_t index) {
    if (index / 8 >= data.size()) throw std::out_of_range("bit index out of range");
    return (data[index / 8] >> (7 - index % 8)) & 1U;
}

void flip_bit(std::span<std::uint8_t> data, std::size_t index) {
    if (index / 8 >= data.size()) throw std::out_of_range("bit index out of range");
    data[index / 8] ^= static_cast<std::uint8_t>(0x80U >> (index % 8));
}

HelperData repetition_encode(const Sigma& sigma) {
    HelperData code;
    for (std::size_t i = 0; i < kSigmaBits; ++i) {
        if (!get_bit(sigma.view(), i)) continue;
        for (std::size_t k = 0; k < kRepetition; ++k) flip_bit(code.bytes, i * kRepetition + k);
    }
    return code;
}

FuzzyOutput gen_fuzzy(const Biometric& bio, SeededRng& rng) {
    const Block draw = rng.next_block();
    FuzzyOutput out;
    for (std::size_t i = 0; i < Sigma::size; ++i) out.sigma.bytes[i] = draw.bytes[i];
    const HelperData code = repetition_encode(out.sigma);
    for (std::size_t i = 0; i < HelperData::size; ++i) out.tau.bytes[i] = code.bytes[i] ^ bio.bytes[i];
    return out;
}

Sigma rep_fuzzy(const Biometric& bio_prime, const HelperData& tau) {
    HelperData noisy;
    for (std::size_t i = 0; i < HelperData::size; ++i) noisy.bytes[i] = tau.bytes[i] ^ bio_prime.bytes[i];
    Sigma sigma;
    for (std::size_t i = 0; i < kSigmaBits; ++i) {
        unsigned ones = 0;
        for (std::size_t k = 0; k < kRepetition; ++k) ones += get_bit(noisy.view(), i * kRepetition + k);
        if (ones * 2 > kRepetition) flip_bit(sigma.bytes, i);
    }
    return sigma;
}

}  // namespace akap
