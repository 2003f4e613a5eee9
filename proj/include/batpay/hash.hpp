#pragma once

#include <memory>

#include "batpay/types.hpp"

namespace batpay {

Digest sha256(ByteView data);

// Incremental SHA-256 (OpenSSL EVP underneath).
class Sha256 {
public:
    Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    ~Sha256();

    Sha256& update(ByteView data);
    Sha256& update(std::string_view text);
    Digest finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Signature hmacSha256(ByteView key, ByteView message);

}  // namespace batpay
