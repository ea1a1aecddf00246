#include "akap/rng.hpp"

#include <stdexcept>

#include "akap/hash.hpp"

namespace akap {

Block SeededRng::next_block() {
    static constexpr std::string_view kLabel = "akap-rng";
    auto ctr = encode_be64(counter_++);
    return sha256({as_bytes(kLabel), seed_.view(), ByteView{ctr}});
}

Block parse_seed(std::string_view hex) {
    if (hex.size() != 64) throw std::invalid_argument("seed must be 64 hex characters");
    return Block::from(from_hex(hex));
}

Block seed_from_index(std::uint64_t n) {
    Block seed;
    auto be = encode_be64(n);
    for (std::size_t i = 0; i < be.size(); ++i) seed.bytes[24 + i] = be[i];
    return seed;
}

}  // namespace akap
