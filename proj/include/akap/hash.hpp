#pragma once

#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>

#include "akap/bytes.hpp"

typedef struct evp_md_st EVP_MD;
typedef struct evp_md_ctx_st EVP_MD_CTX;

namespace akap {

// The protocol's h(.): digest over the raw concatenation of encoded parts.
// Any OpenSSL digest with a 32-byte output can back it; SHA-256 is the default.
class Hash {
public:
    Hash();  // sha256
    explicit Hash(std::string_view name);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[nodiscard]] Block operator()(std::initializer_list<ByteView> parts) const;
    [[nodiscard]] Block operator()(std::span<const ByteView> parts) const;
    [[nodiscard]] Block digest(ByteView data) const;

    // h(tag || raw): maps variable-length values onto XOR-compatible Blocks.
    [[nodiscard]] Block canon_block(std::string_view tag, ByteView raw) const;

    friend bool operator==(const Hash& a, const Hash& b) { return a.name_ == b.name_; }

private:
    friend class HashState;
    std::string name_;
    std::shared_ptr<EVP_MD> md_;
};

// Incremental h(.) whose absorbed prefix can be cloned, so many inputs that
// share a prefix only pay for their suffix.
class HashState {
public:
    explicit HashState(const Hash& h);
    HashState(const HashState& other);
    HashState& operator=(const HashState& other);
    HashState(HashState&&) noexcept = default;
    HashState& operator=(HashState&&) noexcept = default;
    ~HashState() = default;

    void update(ByteView data);
    // Digest of everything absorbed so far; the state itself is left intact.
    [[nodiscard]] Block peek(ByteView suffix);

private:
    struct CtxDeleter {
        void operator()(EVP_MD_CTX* c) const noexcept;
    };
    std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx_;
    std::unique_ptr<EVP_MD_CTX, CtxDeleter> scratch_;
};

// Names accepted by Hash(std::string_view).
[[nodiscard]] std::span<const std::string_view> supported_hashes() noexcept;

// SHA-256 one-shot, independent of the configured protocol hash.
[[nodiscard]] Block sha256(std::initializer_list<ByteView> parts);

}  // namespace akap
