#include "batpay/token.hpp"

#include "batpay/error.hpp"

namespace batpay {

void TokenAdapter::mint(const Address& to, Amount amount) {
    auto next = checkedAdd(external_[to], amount);
    minted_ = checkedAdd(minted_, amount);
    external_[to] = next;
}

void TokenAdapter::pull(const Address& from, Amount amount) {
    auto have = balanceOf(from);
    if (have < amount) fail(Errc::InsufficientFunds, "external balance " + std::to_string(have) + " < " + std::to_string(amount));
    auto next = checkedAdd(reserve_, amount);
    external_[from] = have - amount;
    reserve_ = next;
}

void TokenAdapter::push(const Address& to, Amount amount) {
    if (reserve_ < amount) fail(Errc::InsufficientFunds, "reserve too small");
    auto next = checkedAdd(balanceOf(to), amount);
    reserve_ -= amount;
    external_[to] = next;
}

Amount TokenAdapter::balanceOf(const Address& holder) const {
    auto it = external_.find(holder);
    return it == external_.end() ? 0 : it->second;
}

Amount TokenAdapter::totalSupply() const {
    Amount total = reserve_;
    for (const auto& [_, v] : external_) total = checkedAdd(total, v);
    return total;
}

}  // namespace batpay
