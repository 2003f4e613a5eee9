#pragma once

#include <map>
#include <optional>
#include <vector>

#include "batpay/chain_log.hpp"
#include "batpay/params.hpp"
#include "batpay/types.hpp"

namespace batpay::sim {

/// Recomputes balances from the public chain log alone.
///
/// This deliberately shares no state with Ledger: it folds records in order,
/// keeping its own account table, payment book and slot bookkeeping. Records
/// are assumed to be accepted transactions; inconsistent input (unknown IDs,
/// underflow, a record for a missing slot) throws ProtocolError(BadEncoding).
class BalanceOracle {
public:
    struct View {
        Amount settled = 0;             // spendable balance
        Amount pendingEntitlement = 0;  // committed, not yet collected
        PayIndex lastCollected = 0;
    };

    // Folds records the oracle has not seen yet. The log must extend the one
    // previously synced.
    void sync(const ChainLog& log);
    void apply(const Record& r);

    [[nodiscard]] const Params& params() const { return params_; }
    [[nodiscard]] BlockNumber block() const { return block_; }
    [[nodiscard]] std::size_t accountCount() const { return accounts_.size(); }
    [[nodiscard]] std::size_t paymentCount() const { return payments_.size(); }
    [[nodiscard]] std::size_t recordsSeen() const { return cursor_; }

    // Unknown accounts read as all zero.
    [[nodiscard]] View view(AccountId id) const;
    [[nodiscard]] Amount settled(AccountId id) const { return view(id).settled; }

    // Amount `id` is owed by payment `payIndex` right now: zero when the
    // payment is locked, refunded, unknown or does not list `id`.
    [[nodiscard]] Amount owed(PayIndex payIndex, AccountId id) const;
    // Sum of owed() over (fromExclusive, toInclusive].
    [[nodiscard]] Amount entitlement(AccountId id, PayIndex fromExclusive, PayIndex toInclusive) const;
    // Non-zero (payIndex, owed) pairs over the range, in payIndex order.
    [[nodiscard]] std::vector<ClaimEntry> breakdown(AccountId id, PayIndex fromExclusive,
                                                    PayIndex toInclusive) const;
    // Highest payIndex registered strictly before `block - unlockPeriod`.
    [[nodiscard]] PayIndex latestCollectable() const;
    // Raw payData of a registered payment; nullptr when unknown.
    [[nodiscard]] const Bytes* payData(PayIndex payIndex) const;

    // Total tokens the oracle believes the protocol holds.
    [[nodiscard]] Amount reserve() const { return reserve_; }

private:
    enum class Status { Committed, Locked, Refunded };
    struct Acc {
        Amount balance = 0;
        PayIndex lastCollected = 0;
        // (payIndex, owed-if-committed), ascending.
        std::vector<ClaimEntry> shares;
    };
    struct Pay {
        AccountId from = 0;
        Amount escrow = 0;
        Amount unlockerFee = 0;
        BlockNumber registeredAt = 0;
        Status status = Status::Committed;
        Bytes payData;
    };
    struct Game {
        AccountId recipient = 0;
        PayIndex end = 0;
        Amount amount = 0;
        Amount fee = 0;
        Amount stake = 0;
        bool instant = false;
        std::optional<Address> destination;
        std::optional<AccountId> challenger;
        Amount challengerStake = 0;
    };

    Acc& acc(AccountId id);
    Pay& pay(PayIndex i);
    Game& game(AccountId d, SlotId s);
    [[nodiscard]] bool committed(PayIndex i) const;

    std::size_t cursor_ = 0;
    Params params_;
    BlockNumber block_ = 0;
    Amount reserve_ = 0;
    std::vector<Acc> accounts_;
    std::vector<Pay> payments_;
    std::map<std::pair<AccountId, SlotId>, Game> games_;
};

// Settled balance and pending entitlement of `id` after folding every record
// up to the point where the chain moves past `uptoBlock`.
BalanceOracle::View oracleBalance(const ChainLog& log, AccountId id, BlockNumber uptoBlock);

}  // namespace batpay::sim
