#pragma once

#include <map>

#include "batpay/types.hpp"

namespace batpay {

// In-memory stand-in for the ERC20 contract a protocol instance is bound to.
// Tokens only move between external holders and the protocol reserve.
class TokenAdapter {
public:
    TokenAdapter() = default;
    explicit TokenAdapter(const Address& tokenAddress) : tokenAddress_(tokenAddress) {}

    [[nodiscard]] const Address& tokenAddress() const { return tokenAddress_; }

    // Faucet for external holders; the only way the supply grows.
    void mint(const Address& to, Amount amount);

    // external[from] -> reserve
    void pull(const Address& from, Amount amount);
    // reserve -> external[to]
    void push(const Address& to, Amount amount);

    [[nodiscard]] Amount balanceOf(const Address& holder) const;
    [[nodiscard]] Amount reserve() const { return reserve_; }
    [[nodiscard]] Amount minted() const { return minted_; }
    // reserve + sum of external balances, recomputed.
    [[nodiscard]] Amount totalSupply() const;
    [[nodiscard]] const std::map<Address, Amount>& externalBalances() const { return external_; }

private:
    Address tokenAddress_{};
    std::map<Address, Amount> external_;
    Amount reserve_ = 0;
    Amount minted_ = 0;
};

}  // namespace batpay
