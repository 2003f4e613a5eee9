#include "batpay/sim/monitor.hpp"

namespace batpay::sim {

std::optional<MonitorPlan> monitorStrategyCanonical(const BalanceOracle& oracle, const CollectSlot& slot) {
    if (slot.state != GameState::WaitingChallenge) return std::nullopt;
    auto entitled = oracle.entitlement(slot.recipientId, slot.startPayIndex, slot.endPayIndex);
    if (entitled == slot.amount) return std::nullopt;
    MonitorPlan plan;
    plan.delegateId = slot.delegateId;
    plan.slotId = slot.slotId;
    plan.claimed = slot.amount;
    plan.entitled = entitled;
    return plan;
}

std::optional<MonitorPlan> monitorStrategyCanonical(const ChainLog& log, const CollectSlot& slot) {
    BalanceOracle oracle;
    oracle.sync(log);
    return monitorStrategyCanonical(oracle, slot);
}

std::optional<ClaimEntry> selectInflatedEntry(const BalanceOracle& oracle, const CollectSlot& slot) {
    if (!slot.challengeList || slot.challengeList->empty()) return std::nullopt;
    for (const auto& e : *slot.challengeList)
        if (oracle.owed(e.payIndex, slot.recipientId) != e.amount) return e;
    return slot.challengeList->front();
}

std::optional<MonitorMove> nextMonitorMove(const BalanceOracle& oracle, const CollectSlot& slot, AccountId self,
                                           BlockNumber block) {
    const bool beforeDeadline = block < slot.deadlineBlock;
    switch (slot.state) {
        case GameState::WaitingChallenge:
            if (beforeDeadline && slot.delegateId != self && monitorStrategyCanonical(oracle, slot))
                return MonitorMove{MonitorStep::Challenge, std::nullopt};
            return std::nullopt;
        case GameState::WaitingPaymentSelection:
            if (slot.challengerId != self || !beforeDeadline) return std::nullopt;
            if (auto e = selectInflatedEntry(oracle, slot)) return MonitorMove{MonitorStep::SelectPayment, e};
            return std::nullopt;
        case GameState::ChallengeStarted:
        case GameState::WaitingProof:
            if (slot.challengerId == self && !beforeDeadline) return MonitorMove{MonitorStep::ClaimSuccess, std::nullopt};
            return std::nullopt;
        case GameState::Empty:
        case GameState::ProofAccepted:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace batpay::sim
