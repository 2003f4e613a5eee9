#include "batpay/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

namespace batpay {

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
    Impl() : ctx(EVP_MD_CTX_new()) {
        if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("EVP sha256 init failed");
    }
    ~Impl() { EVP_MD_CTX_free(ctx); }
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {}
Sha256::Sha256(Sha256&&) noexcept = default;
Sha256& Sha256::operator=(Sha256&&) noexcept = default;
Sha256::~Sha256() = default;

Sha256& Sha256::update(ByteView data) {
    if (!data.empty()) EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
    return *this;
}

Sha256& Sha256::update(std::string_view text) {
    return update(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Digest Sha256::finish() {
    Digest out;
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, out.bytes.data(), &len);
    return out;
}

Digest sha256(ByteView data) { return Sha256().update(data).finish(); }

Signature hmacSha256(ByteView key, ByteView message) {
    Signature out;
    unsigned int len = 0;
    HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(), message.size(),
         out.bytes.data(), &len);
    return out;
}

}  // namespace batpay
