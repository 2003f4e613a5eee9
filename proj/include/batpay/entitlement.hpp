#pragma once

#include "batpay/chain_log.hpp"
#include "batpay/types.hpp"

namespace batpay {

// What `accountId` may collect over payIndexes (fromExclusive, toInclusive],
// computed from the public log alone: every Committed payment contributes
// occurrences(accountId) * perDestination; Locked and Refunded payments
// contribute nothing. Indices past the end of the log are ignored.
Amount paymentEntitlement(const ChainLog& log, AccountId accountId, PayIndex fromExclusive,
                          PayIndex toInclusive);

}  // namespace batpay
