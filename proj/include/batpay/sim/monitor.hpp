#pragma once

#include <optional>
#include <vector>

#include "batpay/ledger.hpp"
#include "batpay/sim/oracle.hpp"

namespace batpay::sim {

enum class MonitorStep {
    Challenge,        // state 1, before the deadline
    SelectPayment,    // state 3, pick an entry the delegate cannot prove
    ClaimSuccess,     // state 2 or 4 once the deadline has passed
};

// Decision for one open slot. Empty when the claimed amount equals the
// entitlement the oracle computes over the slot's range.
struct MonitorPlan {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    Amount claimed = 0;
    Amount entitled = 0;
    std::vector<MonitorStep> steps{MonitorStep::Challenge, MonitorStep::SelectPayment, MonitorStep::ClaimSuccess};
};

std::optional<MonitorPlan> monitorStrategyCanonical(const BalanceOracle& oracle, const CollectSlot& slot);
// Convenience overload that folds `log` into a fresh oracle first.
std::optional<MonitorPlan> monitorStrategyCanonical(const ChainLog& log, const CollectSlot& slot);

// First entry of the delegate's list whose amount differs from what the
// payment really owes the recipient. When every entry is honest (an
// understated collect), falls back to the first entry.
std::optional<ClaimEntry> selectInflatedEntry(const BalanceOracle& oracle, const CollectSlot& slot);

struct MonitorMove {
    MonitorStep step{};
    std::optional<ClaimEntry> entry;  // set for SelectPayment
};

// What challenger `self` should do on `slot` at the current block, if
// anything. Only moves that the ledger would accept are returned.
std::optional<MonitorMove> nextMonitorMove(const BalanceOracle& oracle, const CollectSlot& slot, AccountId self,
                                           BlockNumber block);

}  // namespace batpay::sim
