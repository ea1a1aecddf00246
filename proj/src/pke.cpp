#include "akap/pke.hpp"

#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <memory>

#include "akap/hash.hpp"

namespace akap {

namespace {

constexpr std::size_t kKeyLen = 32;
constexpr std::size_t kTagLen = 16;
constexpr std::string_view kEphemeralLabel = "akap-pke-ephemeral";
constexpr std::string_view kKdfInfo = "akap-pke-v1";

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const noexcept { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
    void operator()(EVP_PKEY_CTX* p) const noexcept { EVP_PKEY_CTX_free(p); }
};
struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* p) const noexcept { EVP_CIPHER_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

PkeyPtr private_from_raw(ByteView raw) {
    if (raw.size() != kKeyLen) return nullptr;
    return PkeyPtr{EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, raw.data(), raw.size())};
}

PkeyPtr public_from_raw(ByteView raw) {
    if (raw.size() != kKeyLen) return nullptr;
    return PkeyPtr{EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, raw.data(), raw.size())};
}

Bytes raw_public(EVP_PKEY* key) {
    Bytes out(kKeyLen);
    std::size_t len = out.size();
    if (EVP_PKEY_get_raw_public_key(key, out.data(), &len) != 1 || len != kKeyLen) {
        throw std::runtime_error("EVP_PKEY_get_raw_public_key failed");
    }
    return out;
}

// Returns empty on failure (bad peer key).
Bytes x25519(EVP_PKEY* priv, EVP_PKEY* peer) {
    PkeyCtxPtr ctx{EVP_PKEY_CTX_new(priv, nullptr)};
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 || EVP_PKEY_derive_set_peer(ctx.get(), peer) != 1) {
        return {};
    }
    Bytes secret(kKeyLen);
    std::size_t len = secret.size();
    if (EVP_PKEY_derive(ctx.get(), secret.data(), &len) != 1 || len != kKeyLen) return {};
    return secret;
}

Bytes hkdf(ByteView secret, ByteView salt) {
    PkeyCtxPtr ctx{EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr)};
    Bytes key(kKeyLen);
    std::size_t len = key.size();
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
        EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()) != 1 ||
        EVP_PKEY_CTX_set1_hkdf_salt(ctx.get(), salt.data(), static_cast<int>(salt.size())) != 1 ||
        EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), secret.data(), static_cast<int>(secret.size())) != 1 ||
        EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), reinterpret_cast<const unsigned char*>(kKdfInfo.data()),
                                    static_cast<int>(kKdfInfo.size())) != 1 ||
        EVP_PKEY_derive(ctx.get(), key.data(), &len) != 1 || len != kKeyLen) {
        throw std::runtime_error("HKDF derivation failed");
    }
    return key;
}

Bytes session_key(ByteView shared, ByteView eph_pub, ByteView recipient_pub) {
    Bytes salt(eph_pub.begin(), eph_pub.end());
    salt.insert(salt.end(), recipient_pub.begin(), recipient_pub.end());
    return hkdf(shared, salt);
}

}  // namespace

PkeKeyPair pke_keygen(SeededRng& rng) {
    const Block seed = rng.next_block();
    PkeyPtr priv = private_from_raw(seed.view());
    if (!priv) throw std::runtime_error("X25519 key construction failed");
    return PkeKeyPair{raw_public(priv.get()), Bytes(seed.bytes.begin(), seed.bytes.end())};
}

Bytes pke_encrypt(ByteView public_key, ByteView message) {
    if (message.empty() || message.size() > kPkeMaxMessage) {
        throw std::invalid_argument("pke_encrypt: message must be 1..64 bytes");
    }
    PkeyPtr recipient = public_from_raw(public_key);
    if (!recipient) throw std::invalid_argument("pke_encrypt: malformed public key");

    const Block eph_seed = sha256({as_bytes(kEphemeralLabel), public_key, message});
    PkeyPtr eph = private_from_raw(eph_seed.view());
    if (!eph) throw std::runtime_error("X25519 key construction failed");
    const Bytes eph_pub = raw_public(eph.get());
    const Bytes shared = x25519(eph.get(), recipient.get());
    if (shared.empty()) throw std::invalid_argument("pke_encrypt: key agreement failed");
    const Bytes key = session_key(shared, eph_pub, public_key);

    Bytes out = eph_pub;
    out.resize(kKeyLen + message.size() + kTagLen);
    const unsigned char iv[12] = {};
    CipherCtxPtr ctx{EVP_CIPHER_CTX_new()};
    int len = 0;
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), iv) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data() + kKeyLen, &len, message.data(),
                          static_cast<int>(message.size())) != 1 ||
        EVP_EncryptFinal_ex(ctx.get(), out.data() + kKeyLen + len, &len) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagLen),
                            out.data() + kKeyLen + message.size()) != 1) {
        throw std::runtime_error("AES-GCM encryption failed");
    }
    return out;
}

Bytes pke_decrypt(ByteView private_key, ByteView ciphertext) {
    if (ciphertext.size() <= kPkeOverhead || ciphertext.size() > kPkeOverhead + kPkeMaxMessage) {
        throw DecryptionError("ciphertext has invalid length");
    }
    PkeyPtr priv = private_from_raw(private_key);
    if (!priv) throw DecryptionError("malformed private key");
    const ByteView eph_pub = ciphertext.first(kKeyLen);
    PkeyPtr eph = public_from_raw(eph_pub);
    if (!eph) throw DecryptionError("malformed ephemeral key");
    const Bytes shared = x25519(priv.get(), eph.get());
    if (shared.empty()) throw DecryptionError("key agreement failed");
    const Bytes key = session_key(shared, eph_pub, raw_public(priv.get()));

    const std::size_t body_len = ciphertext.size() - kPkeOverhead;
    const ByteView body = ciphertext.subspan(kKeyLen, body_len);
    Bytes tag(ciphertext.end() - static_cast<std::ptrdiff_t>(kTagLen), ciphertext.end());
    Bytes plain(body_len);
    const unsigned char iv[12] = {};
    CipherCtxPtr ctx{EVP_CIPHER_CTX_new()};
    int len = 0;
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), iv) != 1 ||
        EVP_DecryptUpdate(ctx.get(), plain.data(), &len, body.data(), static_cast<int>(body.size())) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagLen), tag.data()) != 1) {
        throw DecryptionError("AES-GCM setup failed");
    }
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) != 1) {
        throw DecryptionError("authentication tag mismatch");
    }
    return plain;
}

}  // namespace akap
