#pragma once

#include <map>
#include <string_view>

#include "batpay/types.hpp"

namespace batpay {

// Simulated key pair. The address is derived from the secret and signatures
// are HMAC-SHA256 under the secret: adequate for a closed simulation where a
// Keyring stands in for public-key recovery, not for production use.
class Identity {
public:
    explicit Identity(const Digest& secret);
    static Identity fromLabel(std::string_view label);

    [[nodiscard]] const Address& address() const { return address_; }
    [[nodiscard]] const Digest& secret() const { return secret_; }
    [[nodiscard]] Signature sign(ByteView message) const;

private:
    Digest secret_;
    Address address_;
};

class Keyring {
public:
    void enroll(const Identity& id) { secrets_[id.address()] = id.secret(); }
    [[nodiscard]] bool knows(const Address& a) const { return secrets_.count(a) != 0; }
    [[nodiscard]] bool verify(const Address& signer, ByteView message, const Signature& sig) const;

private:
    std::map<Address, Digest> secrets_;
};

}  // namespace batpay
