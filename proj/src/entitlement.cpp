#include "batpay/entitlement.hpp"

#include <unordered_map>

#include "batpay/error.hpp"
#include "batpay/paydata.hpp"

namespace batpay {

Amount paymentEntitlement(const ChainLog& log, AccountId accountId, PayIndex fromExclusive, PayIndex toInclusive) {
    struct Share {
        Amount owed = 0;
        bool committed = false;
    };
    std::unordered_map<PayIndex, Share> shares;
    for (const auto& rec : log.records()) {
        if (const auto* p = std::get_if<record::Payment>(&rec)) {
            if (p->payIndex <= fromExclusive || p->payIndex > toInclusive) continue;
            auto payees = decodePayData(p->payData);
            shares[p->payIndex] = Share{checkedMul(p->perDestination, countOccurrences(payees, accountId)),
                                        !p->lockHash.has_value()};
        } else if (const auto* u = std::get_if<record::Unlock>(&rec)) {
            if (auto it = shares.find(u->payIndex); it != shares.end()) it->second.committed = true;
        } else if (const auto* r = std::get_if<record::Refund>(&rec)) {
            if (auto it = shares.find(r->payIndex); it != shares.end()) it->second.committed = false;
        }
    }
    Amount total = 0;
    for (const auto& [_, s] : shares)
        if (s.committed) total = checkedAdd(total, s.owed);
    return total;
}

}  // namespace batpay
