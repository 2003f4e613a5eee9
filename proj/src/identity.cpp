#include "batpay/identity.hpp"

#include <algorithm>

#include "batpay/hash.hpp"

namespace batpay {

Identity::Identity(const Digest& secret) : secret_(secret) {
    auto h = Sha256().update("batpay/address").update(secret_.view()).finish();
    std::copy_n(h.bytes.begin(), Address::size(), address_.bytes.begin());
}

Identity Identity::fromLabel(std::string_view label) {
    return Identity(Sha256().update("batpay/secret").update(label).finish());
}

Signature Identity::sign(ByteView message) const { return hmacSha256(secret_.view(), message); }

bool Keyring::verify(const Address& signer, ByteView message, const Signature& sig) const {
    auto it = secrets_.find(signer);
    if (it == secrets_.end()) return false;
    return hmacSha256(it->second.view(), message) == sig;
}

}  // namespace batpay
