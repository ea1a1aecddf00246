#pragma once

#include <stdexcept>

#include "akap/bytes.hpp"
#include "akap/rng.hpp"

namespace akap {

// Public-key encryption used once, on the secure sensor registration channel.
// Realized as X25519 + HKDF-SHA256 + AES-256-GCM. The ephemeral key is
// derived from (recipient, message), so encryption is deterministic and the
// whole simulation stays a function of its seed.
//
// Ciphertext layout: ephemeral public key (32) || body (|m|) || GCM tag (16).
struct PkeKeyPair {
    Bytes public_key;
    Bytes private_key;

    friend bool operator==(const PkeKeyPair&, const PkeKeyPair&) = default;
};

inline constexpr std::size_t kPkeMaxMessage = 64;
inline constexpr std::size_t kPkeOverhead = 32 + 16;

class DecryptionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] PkeKeyPair pke_keygen(SeededRng& rng);
// Throws std::invalid_argument for empty messages or messages over 64 bytes.
[[nodiscard]] Bytes pke_encrypt(ByteView public_key, ByteView message);
// Throws DecryptionError on a malformed ciphertext or a key mismatch.
[[nodiscard]] Bytes pke_decrypt(ByteView private_key, ByteView ciphertext);

}  // namespace akap
