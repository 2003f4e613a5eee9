#include <algorithm>

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"
#include "batpay/hash.hpp"
#include "batpay/ledger.hpp"
#include "batpay/paydata.hpp"

namespace batpay {

Digest lockingKeyHash(AccountId unlockerId, ByteView key) {
    ByteWriter w;
    w.u32(unlockerId);
    w.raw(key);
    return sha256(w.bytes());
}

Payment& Ledger::mutablePayment(PayIndex payIndex) {
    if (payIndex == 0 || payIndex > payments_.size()) fail(Errc::UnknownPayment, "payIndex " + std::to_string(payIndex));
    return payments_[payIndex - 1];
}

const Payment& Ledger::payment(PayIndex payIndex) const {
    if (payIndex == 0 || payIndex > payments_.size()) fail(Errc::UnknownPayment, "payIndex " + std::to_string(payIndex));
    return payments_[payIndex - 1];
}

PayIndex Ledger::latestCollectablePayIndex() const {
    // registeredAtBlock is non-decreasing along the log, so collectability is a prefix.
    auto it = std::partition_point(payments_.begin(), payments_.end(),
                                   [&](const Payment& p) { return p.collectableFromBlock <= block_; });
    return static_cast<PayIndex>(it - payments_.begin());
}

PayIndex Ledger::registerPayment(const Address& sender, AccountId fromId, Amount perDestination,
                                 std::span<const AccountId> payees, const std::optional<Digest>& lockHash,
                                 Amount unlockerFee) {
    const auto& buyer = claimedAccount(fromId);
    requireSender(buyer, sender, "payer");
    if (payees.empty()) fail(Errc::EmptyPayees, "payment needs at least one payee");
    if (payees.size() > params_.maxPaymentsPerBatch)
        fail(Errc::BatchTooLarge, std::to_string(payees.size()) + " payees > " + std::to_string(params_.maxPaymentsPerBatch));
    if (perDestination == 0) fail(Errc::InvalidArgument, "per-destination amount must be positive");
    if (!lockHash && unlockerFee != 0) fail(Errc::InvalidArgument, "unlocker fee requires a locked payment");
    auto wire = encodePayData(payees);  // rejects decreasing lists
    if (payees.back() >= accounts_.size())
        fail(Errc::UnknownAccount, "payee " + std::to_string(payees.back()) + " not allocated");
    auto escrow = checkedAdd(checkedMul(perDestination, payees.size()), unlockerFee);
    if (buyer.balance < escrow)
        fail(Errc::InsufficientFunds, "balance " + std::to_string(buyer.balance) + " < escrow " + std::to_string(escrow));
    auto newEscrow = checkedAdd(escrow_, escrow);

    Payment p;
    p.payIndex = payments_.size() + 1;
    p.fromId = fromId;
    p.perDestinationAmount = perDestination;
    p.payeeCount = static_cast<std::uint32_t>(payees.size());
    p.payDataDigest = sha256(wire);
    p.totalEscrow = escrow;
    p.lockingKeyHash = lockHash;
    p.unlockerFee = unlockerFee;
    p.status = lockHash ? PaymentStatus::Locked : PaymentStatus::Committed;
    p.registeredAtBlock = block_;
    p.collectableFromBlock = checkedAdd(block_, params_.unlockPeriod);

    accounts_[fromId].balance -= escrow;
    escrow_ = newEscrow;
    payments_.push_back(p);
    log_.append(record::Payment{p.payIndex, fromId, perDestination, unlockerFee, lockHash, std::move(wire)});
    return p.payIndex;
}

void Ledger::unlock(const Address& sender, PayIndex payIndex, AccountId unlockerId, ByteView key) {
    const auto& p = payment(payIndex);
    if (p.status != PaymentStatus::Locked) fail(Errc::NotLocked, "payment " + std::to_string(payIndex));
    if (block_ >= p.collectableFromBlock)
        fail(Errc::WindowExpired, "unlock window closed at block " + std::to_string(p.collectableFromBlock));
    const auto& unlocker = claimedAccount(unlockerId);
    requireSender(unlocker, sender, "unlocker");
    if (lockingKeyHash(unlockerId, key) != *p.lockingKeyHash) fail(Errc::BadKey, "key does not match lock");
    auto credited = checkedAdd(unlocker.balance, p.unlockerFee);

    accounts_[unlockerId].balance = credited;
    escrow_ -= p.unlockerFee;
    payments_[payIndex - 1].status = PaymentStatus::Committed;
    log_.append(record::Unlock{payIndex, unlockerId, Bytes(key.begin(), key.end())});
}

void Ledger::refundLockedPayment(PayIndex payIndex) {
    const auto& p = payment(payIndex);
    if (p.status != PaymentStatus::Locked) fail(Errc::NotLocked, "payment " + std::to_string(payIndex));
    if (block_ < p.collectableFromBlock)
        fail(Errc::WindowOpen, "unlock window open until block " + std::to_string(p.collectableFromBlock));
    auto restored = checkedAdd(accounts_[p.fromId].balance, p.totalEscrow);

    accounts_[p.fromId].balance = restored;
    escrow_ -= p.totalEscrow;
    payments_[payIndex - 1].status = PaymentStatus::Refunded;
    log_.append(record::Refund{payIndex});
}

}  // namespace batpay
