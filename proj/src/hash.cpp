#include "akap/hash.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace akap {

namespace {

constexpr std::string_view kSupported[] = {"sha256", "sha3-256", "blake2s256", "sha512-256"};

struct CtxDeleter {
    void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
};

EVP_MD_CTX* thread_ctx() {
    thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx{EVP_MD_CTX_new()};
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    return ctx.get();
}

Block run_digest(const EVP_MD* md, std::span<const ByteView> parts) {
    EVP_MD_CTX* ctx = thread_ctx();
    if (EVP_DigestInit_ex(ctx, md, nullptr) != 1) throw std::runtime_error("EVP_DigestInit_ex failed");
    for (const auto& p : parts) {
        if (!p.empty() && EVP_DigestUpdate(ctx, p.data(), p.size()) != 1) {
            throw std::runtime_error("EVP_DigestUpdate failed");
        }
    }
    Block out;
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, out.bytes.data(), &len) != 1 || len != Block::size) {
        throw std::runtime_error("EVP_DigestFinal_ex failed");
    }
    return out;
}

}  // namespace

Hash::Hash() : Hash("sha256") {}

Hash::Hash(std::string_view name) : name_(name) {
    bool known = false;
    for (auto s : kSupported) known = known || s == name;
    if (!known) throw std::invalid_argument("unsupported hash: " + name_);
    // Explicit fetch: passing a fetched EVP_MD to EVP_DigestInit_ex skips the
    // per-call provider lookup, which dominates for short inputs.
    md_.reset(EVP_MD_fetch(nullptr, name_.c_str(), nullptr), EVP_MD_free);
    if (!md_ || EVP_MD_get_size(md_.get()) != static_cast<int>(Block::size)) {
        throw std::invalid_argument("hash unavailable or not 32 bytes: " + name_);
    }
}

Block Hash::operator()(std::initializer_list<ByteView> parts) const {
    return run_digest(md_.get(), {parts.begin(), parts.size()});
}

Block Hash::operator()(std::span<const ByteView> parts) const { return run_digest(md_.get(), parts); }

Block Hash::digest(ByteView data) const { return run_digest(md_.get(), {&data, 1}); }

Block Hash::canon_block(std::string_view tag, ByteView raw) const {
    if (tag.empty()) throw std::invalid_argument("canon_block tag must be nonempty");
    return (*this)({as_bytes(tag), raw});
}

std::span<const std::string_view> supported_hashes() noexcept { return kSupported; }

void HashState::CtxDeleter::operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }

HashState::HashState(const Hash& h) : ctx_(EVP_MD_CTX_new()), scratch_(EVP_MD_CTX_new()) {
    if (!ctx_ || !scratch_ || EVP_DigestInit_ex(ctx_.get(), h.md_.get(), nullptr) != 1) {
        throw std::runtime_error("HashState init failed");
    }
}

HashState::HashState(const HashState& other) : ctx_(EVP_MD_CTX_new()), scratch_(EVP_MD_CTX_new()) {
    if (!ctx_ || !scratch_ || EVP_MD_CTX_copy_ex(ctx_.get(), other.ctx_.get()) != 1) {
        throw std::runtime_error("HashState copy failed");
    }
}

HashState& HashState::operator=(const HashState& other) {
    if (this != &other && EVP_MD_CTX_copy_ex(ctx_.get(), other.ctx_.get()) != 1) {
        throw std::runtime_error("HashState copy failed");
    }
    return *this;
}

void HashState::update(ByteView data) {
    if (!data.empty() && EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) {
        throw std::runtime_error("EVP_DigestUpdate failed");
    }
}

Block HashState::peek(ByteView suffix) {
    Block out;
    unsigned int len = 0;
    if (EVP_MD_CTX_copy_ex(scratch_.get(), ctx_.get()) != 1 ||
        (!suffix.empty() && EVP_DigestUpdate(scratch_.get(), suffix.data(), suffix.size()) != 1) ||
        EVP_DigestFinal_ex(scratch_.get(), out.bytes.data(), &len) != 1 || len != Block::size) {
        throw std::runtime_error("HashState digest failed");
    }
    return out;
}

Block sha256(std::initializer_list<ByteView> parts) {
    static const Hash fixed("sha256");
    return fixed(parts);
}

}  // namespace akap
