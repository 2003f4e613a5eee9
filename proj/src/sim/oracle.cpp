#include "batpay/sim/oracle.hpp"

#include <algorithm>

#include "batpay/error.hpp"
#include "batpay/paydata.hpp"

namespace batpay::sim {

namespace {

[[noreturn]] void inconsistent(const std::string& what) { fail(Errc::BadEncoding, "oracle: " + what); }

void debit(Amount& balance, Amount amount, const char* what) {
    if (balance < amount) inconsistent(std::string(what) + " underflows");
    balance -= amount;
}

void credit(Amount& balance, Amount amount) { balance = checkedAdd(balance, amount); }

}  // namespace

BalanceOracle::Acc& BalanceOracle::acc(AccountId id) {
    if (id >= accounts_.size()) inconsistent("unknown account " + std::to_string(id));
    return accounts_[id];
}

BalanceOracle::Pay& BalanceOracle::pay(PayIndex i) {
    if (i == 0 || i > payments_.size()) inconsistent("unknown payment " + std::to_string(i));
    return payments_[i - 1];
}

BalanceOracle::Game& BalanceOracle::game(AccountId d, SlotId s) {
    auto it = games_.find({d, s});
    if (it == games_.end()) inconsistent("no open game in slot " + std::to_string(d) + "/" + std::to_string(s));
    return it->second;
}

bool BalanceOracle::committed(PayIndex i) const {
    return i >= 1 && i <= payments_.size() && payments_[i - 1].status == Status::Committed;
}

void BalanceOracle::sync(const ChainLog& log) {
    if (log.size() < cursor_) inconsistent("log shrank since last sync");
    for (; cursor_ < log.size(); ++cursor_) apply(log[cursor_]);
}

void BalanceOracle::apply(const Record& rec) {
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, record::Instantiate>) {
                params_ = r.params;
            } else if constexpr (std::is_same_v<T, record::Mint>) {
                // external to the protocol
            } else if constexpr (std::is_same_v<T, record::AdvanceBlock>) {
                if (checkedAdd(block_, r.count) != r.newBlock) inconsistent("block numbers skip");
                block_ = r.newBlock;
            } else if constexpr (std::is_same_v<T, record::Register>) {
                if (r.id != accounts_.size()) inconsistent("register id out of sequence");
                accounts_.emplace_back();
            } else if constexpr (std::is_same_v<T, record::Deposit>) {
                AccountId id = r.target;
                if (r.target == kNewAccount) {
                    id = static_cast<AccountId>(accounts_.size());
                    accounts_.emplace_back();
                }
                if (id != r.resolvedId) inconsistent("deposit resolved to an unexpected id");
                credit(acc(id).balance, r.amount);
                credit(reserve_, r.amount);
            } else if constexpr (std::is_same_v<T, record::Withdraw>) {
                debit(acc(r.id).balance, r.amount, "withdraw");
                debit(reserve_, r.amount, "reserve");
            } else if constexpr (std::is_same_v<T, record::BulkRegister>) {
                if (r.firstId != accounts_.size()) inconsistent("bulk range out of sequence");
                accounts_.resize(accounts_.size() + r.count);
            } else if constexpr (std::is_same_v<T, record::ClaimBulkId>) {
                acc(r.id);
            } else if constexpr (std::is_same_v<T, record::Payment>) {
                if (r.payIndex != payments_.size() + 1) inconsistent("payIndex out of sequence");
                auto payees = decodePayData(r.payData, accounts_.size());
                Pay p;
                p.from = r.fromId;
                p.unlockerFee = r.unlockerFee;
                p.escrow = checkedAdd(checkedMul(r.perDestination, payees.size()), r.unlockerFee);
                p.registeredAt = block_;
                p.status = r.lockHash ? Status::Locked : Status::Committed;
                p.payData = r.payData;
                debit(acc(r.fromId).balance, p.escrow, "payment escrow");
                for (std::size_t i = 0; i < payees.size();) {
                    std::size_t j = i;
                    while (j < payees.size() && payees[j] == payees[i]) ++j;
                    accounts_[payees[i]].shares.push_back({r.payIndex, checkedMul(r.perDestination, j - i)});
                    i = j;
                }
                payments_.push_back(std::move(p));
            } else if constexpr (std::is_same_v<T, record::Unlock>) {
                auto& p = pay(r.payIndex);
                if (p.status != Status::Locked) inconsistent("unlock of a non-locked payment");
                p.status = Status::Committed;
                credit(acc(r.unlockerId).balance, p.unlockerFee);
            } else if constexpr (std::is_same_v<T, record::Refund>) {
                auto& p = pay(r.payIndex);
                if (p.status != Status::Locked) inconsistent("refund of a non-locked payment");
                p.status = Status::Refunded;
                credit(acc(p.from).balance, p.escrow);
            } else if constexpr (std::is_same_v<T, record::CollectOpen>) {
                const auto& q = r.request;
                if (games_.count({q.delegateId, q.slotId})) inconsistent("collect into an occupied slot");
                Game g;
                g.recipient = q.recipientId;
                g.end = q.lastPaymentIndex;
                g.amount = q.amount;
                g.fee = q.fee;
                g.stake = params_.collectStake;
                g.instant = q.slotId > params_.instantSlotThreshold;
                g.destination = q.destination;
                if (q.fee > q.amount) inconsistent("fee above amount");
                const Amount net = q.amount - q.fee;
                debit(acc(q.delegateId).balance, checkedAdd(g.stake, g.instant ? net : 0), "collect stake");
                if (g.instant) {
                    auto& rcp = acc(q.recipientId);
                    rcp.lastCollected = q.lastPaymentIndex;
                    if (q.destination && net > 0) debit(reserve_, net, "reserve");
                    else credit(rcp.balance, net);
                }
                games_.emplace(std::pair{q.delegateId, q.slotId}, std::move(g));
            } else if constexpr (std::is_same_v<T, record::Challenge>) {
                auto& g = game(r.delegateId, r.slotId);
                debit(acc(r.challengerId).balance, params_.challengeStake, "challenge stake");
                g.challenger = r.challengerId;
                g.challengerStake = params_.challengeStake;
            } else if constexpr (std::is_same_v<T, record::Response> || std::is_same_v<T, record::Selection> ||
                                 std::is_same_v<T, record::Proof>) {
                game(r.delegateId, r.slotId);
            } else if constexpr (std::is_same_v<T, record::FreeSlot>) {
                auto& g = game(r.delegateId, r.slotId);
                if (g.instant) {
                    credit(acc(r.delegateId).balance, checkedAdd(g.amount, g.stake));
                } else {
                    auto& rcp = acc(g.recipient);
                    rcp.lastCollected = g.end;
                    const Amount net = g.amount - g.fee;
                    if (g.destination && net > 0) debit(reserve_, net, "reserve");
                    else credit(rcp.balance, net);
                    credit(acc(r.delegateId).balance, checkedAdd(g.fee, g.stake));
                }
                games_.erase({r.delegateId, r.slotId});
            } else if constexpr (std::is_same_v<T, record::ChallengeSuccess>) {
                auto& g = game(r.delegateId, r.slotId);
                if (!g.challenger) inconsistent("challenge success without a challenger");
                credit(acc(*g.challenger).balance, checkedAdd(g.stake, g.challengerStake));
                games_.erase({r.delegateId, r.slotId});
            } else if constexpr (std::is_same_v<T, record::ChallengeFailed>) {
                auto& g = game(r.delegateId, r.slotId);
                credit(acc(r.delegateId).balance, g.challengerStake);
                g.challenger.reset();
                g.challengerStake = 0;
            }
        },
        rec);
}

BalanceOracle::View BalanceOracle::view(AccountId id) const {
    if (id >= accounts_.size()) return {};
    const auto& a = accounts_[id];
    return {a.balance, entitlement(id, a.lastCollected, payments_.size()), a.lastCollected};
}

Amount BalanceOracle::owed(PayIndex payIndex, AccountId id) const {
    if (id >= accounts_.size() || !committed(payIndex)) return 0;
    const auto& shares = accounts_[id].shares;
    auto it = std::lower_bound(shares.begin(), shares.end(), payIndex,
                               [](const ClaimEntry& e, PayIndex p) { return e.payIndex < p; });
    return it != shares.end() && it->payIndex == payIndex ? it->amount : 0;
}

std::vector<ClaimEntry> BalanceOracle::breakdown(AccountId id, PayIndex fromExclusive, PayIndex toInclusive) const {
    std::vector<ClaimEntry> out;
    if (id >= accounts_.size()) return out;
    const auto& shares = accounts_[id].shares;
    auto it = std::upper_bound(shares.begin(), shares.end(), fromExclusive,
                               [](PayIndex p, const ClaimEntry& e) { return p < e.payIndex; });
    for (; it != shares.end() && it->payIndex <= toInclusive; ++it)
        if (committed(it->payIndex) && it->amount > 0) out.push_back(*it);
    return out;
}

Amount BalanceOracle::entitlement(AccountId id, PayIndex fromExclusive, PayIndex toInclusive) const {
    Amount total = 0;
    for (const auto& e : breakdown(id, fromExclusive, toInclusive)) total = checkedAdd(total, e.amount);
    return total;
}

PayIndex BalanceOracle::latestCollectable() const {
    auto it = std::partition_point(payments_.begin(), payments_.end(), [&](const Pay& p) {
        return p.registeredAt + params_.unlockPeriod <= block_;
    });
    return static_cast<PayIndex>(it - payments_.begin());
}

const Bytes* BalanceOracle::payData(PayIndex payIndex) const {
    if (payIndex == 0 || payIndex > payments_.size()) return nullptr;
    return &payments_[payIndex - 1].payData;
}

BalanceOracle::View oracleBalance(const ChainLog& log, AccountId id, BlockNumber uptoBlock) {
    BalanceOracle o;
    for (const auto& r : log.records()) {
        if (const auto* adv = std::get_if<record::AdvanceBlock>(&r); adv && adv->newBlock > uptoBlock) break;
        o.apply(r);
    }
    return o.view(id);
}

}  // namespace batpay::sim
