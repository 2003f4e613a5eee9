#include <algorithm>

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"
#include "batpay/hash.hpp"
#include "batpay/ledger.hpp"
#include "batpay/paydata.hpp"

namespace batpay {

namespace {
std::string slotName(AccountId d, SlotId s) {
    return "slot (" + std::to_string(d) + ", " + std::to_string(s) + ")";
}

void requireState(const CollectSlot& s, GameState expected) {
    if (s.state != expected)
        fail(Errc::WrongState, slotName(s.delegateId, s.slotId) + " is " + std::string(gameStateName(s.state)) +
                                   ", expected " + std::string(gameStateName(expected)));
}
}  // namespace

Bytes collectAuthorizationMessage(const Address& instance, const CollectRequest& req) {
    ByteWriter w;
    w.fixed(instance);
    w.u32(req.delegateId);
    w.u16(req.slotId);
    w.u32(req.recipientId);
    w.u64(req.lastPaymentIndex);
    w.u64(req.amount);
    w.u64(req.fee);
    w.fixed(req.destination.value_or(Address{}));
    return std::move(w).take();
}

const CollectSlot* Ledger::slot(AccountId delegateId, SlotId slotId) const {
    auto it = slots_.find(SlotKey{delegateId, slotId});
    return it == slots_.end() ? nullptr : &it->second;
}

CollectSlot& Ledger::activeSlot(AccountId delegateId, SlotId slotId) {
    auto it = slots_.find(SlotKey{delegateId, slotId});
    if (it == slots_.end()) fail(Errc::UnknownSlot, slotName(delegateId, slotId) + " is empty");
    return it->second;
}

void Ledger::requireBefore(const CollectSlot& s) const {
    if (block_ >= s.deadlineBlock)
        fail(Errc::DeadlinePassed, slotName(s.delegateId, s.slotId) + " deadline " + std::to_string(s.deadlineBlock));
}

void Ledger::requireAtOrAfter(const CollectSlot& s) const {
    if (block_ < s.deadlineBlock)
        fail(Errc::DeadlineNotReached,
             slotName(s.delegateId, s.slotId) + " deadline " + std::to_string(s.deadlineBlock));
}

void Ledger::collect(const Address& sender, const CollectRequest& req, const Signature& signature) {
    const auto& delegate = claimedAccount(req.delegateId);
    requireSender(delegate, sender, "delegate");
    if (slots_.count(SlotKey{req.delegateId, req.slotId}) != 0)
        fail(Errc::SlotOccupied, slotName(req.delegateId, req.slotId));
    const auto& recipient = claimedAccount(req.recipientId);
    if (authMode_ == AuthMode::Verify &&
        !keyring_.verify(*recipient.address, collectAuthorizationMessage(instance_, req), signature))
        fail(Errc::BadSignature, "collect not authorized by recipient " + std::to_string(req.recipientId));
    if (req.fee > req.amount) fail(Errc::InvalidArgument, "fee exceeds amount");
    const PayIndex start = recipient.lastCollectedPayIndex;
    if (req.lastPaymentIndex <= start)
        fail(Errc::StaleRange, "lastPaymentIndex " + std::to_string(req.lastPaymentIndex) +
                                   " <= already collected " + std::to_string(start));
    if (req.lastPaymentIndex > latestCollectablePayIndex())
        fail(Errc::NotCollectable, "payment " + std::to_string(req.lastPaymentIndex) + " still inside unlock period");
    for (const auto& [_, s] : slots_)
        if (s.recipientId == req.recipientId && s.endPayIndex > start)
            fail(Errc::OverlappingRange, "recipient already in " + slotName(s.delegateId, s.slotId));

    const bool instant = req.slotId > params_.instantSlotThreshold;
    const Amount net = req.amount - req.fee;
    const Amount need = checkedAdd(params_.collectStake, instant ? net : 0);
    if (delegate.balance < need)
        fail(Errc::InsufficientFunds, "delegate balance " + std::to_string(delegate.balance) + " < " + std::to_string(need));
    const bool sameAccount = req.delegateId == req.recipientId;
    if (instant && !sameAccount) checkedAdd(recipient.balance, net);
    const auto deadline = checkedAdd(block_, params_.challengePeriod);

    accounts_[req.delegateId].balance -= need;
    if (instant) {
        auto& r = accounts_[req.recipientId];
        r.balance += net;
        r.lastCollectedPayIndex = req.lastPaymentIndex;
        if (req.destination && net > 0) {
            token_.push(*req.destination, net);
            r.balance -= net;
        }
    }
    CollectSlot s;
    s.delegateId = req.delegateId;
    s.slotId = req.slotId;
    s.recipientId = req.recipientId;
    s.startPayIndex = start;
    s.endPayIndex = req.lastPaymentIndex;
    s.amount = req.amount;
    s.fee = req.fee;
    s.destination = req.destination;
    s.state = GameState::WaitingChallenge;
    s.deadlineBlock = deadline;
    s.delegateStake = params_.collectStake;
    s.instant = instant;
    s.advanced = instant ? net : 0;
    slots_.emplace(SlotKey{req.delegateId, req.slotId}, std::move(s));
    log_.append(record::CollectOpen{req, start, signature});
}

void Ledger::freeSlot(AccountId delegateId, SlotId slotId) {
    auto& s = activeSlot(delegateId, slotId);
    requireState(s, GameState::WaitingChallenge);
    requireAtOrAfter(s);
    if (escrow_ < s.amount)
        fail(Errc::InsufficientEscrow, "escrow " + std::to_string(escrow_) + " cannot cover collect of " +
                                           std::to_string(s.amount));
    const Amount net = s.amount - s.fee;
    auto& delegate = accounts_[delegateId];
    auto& recipient = accounts_[s.recipientId];
    if (s.instant) {
        auto credited = checkedAdd(delegate.balance, checkedAdd(s.amount, s.delegateStake));
        delegate.balance = credited;
    } else {
        // Pre-check every addition before touching balances.
        Amount recipientAfter = checkedAdd(recipient.balance, net);
        Amount delegateGain = checkedAdd(s.fee, s.delegateStake);
        if (delegateId == s.recipientId) checkedAdd(recipientAfter, delegateGain);
        else checkedAdd(delegate.balance, delegateGain);
        recipient.balance = recipientAfter;
        recipient.lastCollectedPayIndex = s.endPayIndex;
        if (s.destination && net > 0) {
            token_.push(*s.destination, net);
            recipient.balance -= net;
        }
        delegate.balance += delegateGain;
    }
    escrow_ -= s.amount;
    drawnFromEscrow_ += s.amount;
    slots_.erase(SlotKey{delegateId, slotId});
    log_.append(record::FreeSlot{delegateId, slotId});
}

void Ledger::challenge(const Address& sender, AccountId delegateId, SlotId slotId, AccountId challengerId) {
    auto& s = activeSlot(delegateId, slotId);
    requireState(s, GameState::WaitingChallenge);
    requireBefore(s);
    if (challengerId == delegateId) fail(Errc::SelfChallenge, "delegate cannot challenge its own slot");
    const auto& challenger = claimedAccount(challengerId);
    requireSender(challenger, sender, "challenger");
    if (challenger.balance < params_.challengeStake)
        fail(Errc::InsufficientFunds, "challenger balance below challengeStake");
    const auto deadline = checkedAdd(block_, params_.responsePeriod);

    accounts_[challengerId].balance -= params_.challengeStake;
    s.challengerId = challengerId;
    s.challengerStake = params_.challengeStake;
    s.state = GameState::ChallengeStarted;
    s.deadlineBlock = deadline;
    log_.append(record::Challenge{delegateId, slotId, challengerId});
}

void Ledger::respondWithPaymentList(const Address& sender, AccountId delegateId, SlotId slotId,
                                    std::span<const ClaimEntry> entries) {
    auto& s = activeSlot(delegateId, slotId);
    requireSender(account(delegateId), sender, "delegate");
    requireState(s, GameState::ChallengeStarted);
    requireBefore(s);
    Amount total = 0;
    PayIndex prev = s.startPayIndex;
    for (const auto& e : entries) {
        if (e.payIndex <= prev || e.payIndex > s.endPayIndex)
            fail(Errc::OutOfRange, "payIndex " + std::to_string(e.payIndex) +
                                       " not strictly increasing inside the collected range");
        prev = e.payIndex;
        total = checkedAdd(total, e.amount);
    }
    if (total != s.amount)
        fail(Errc::SumMismatch, "list sums to " + std::to_string(total) + ", collect claims " + std::to_string(s.amount));
    const auto deadline = checkedAdd(block_, params_.responsePeriod);

    s.challengeList.emplace(entries.begin(), entries.end());
    s.state = GameState::WaitingPaymentSelection;
    s.deadlineBlock = deadline;
    log_.append(record::Response{delegateId, slotId, *s.challengeList});
}

void Ledger::selectPayment(const Address& sender, AccountId delegateId, SlotId slotId, const ClaimEntry& entry) {
    auto& s = activeSlot(delegateId, slotId);
    requireState(s, GameState::WaitingPaymentSelection);
    requireSender(account(*s.challengerId), sender, "challenger");
    requireBefore(s);
    if (std::find(s.challengeList->begin(), s.challengeList->end(), entry) == s.challengeList->end())
        fail(Errc::NotInList, "(" + std::to_string(entry.payIndex) + ", " + std::to_string(entry.amount) +
                                  ") is not in the delegate's list");
    const auto deadline = checkedAdd(block_, params_.responsePeriod);

    s.challengedEntry = entry;
    s.state = GameState::WaitingProof;
    s.deadlineBlock = deadline;
    log_.append(record::Selection{delegateId, slotId, entry});
}

void Ledger::provePaymentInclusion(const Address& sender, AccountId delegateId, SlotId slotId, ByteView payData) {
    auto& s = activeSlot(delegateId, slotId);
    requireSender(account(delegateId), sender, "delegate");
    requireState(s, GameState::WaitingProof);
    requireBefore(s);
    const auto& entry = *s.challengedEntry;
    const auto& p = payment(entry.payIndex);
    if (sha256(payData) != p.payDataDigest)
        fail(Errc::DigestMismatch, "payData does not hash to payment " + std::to_string(entry.payIndex));
    if (p.status != PaymentStatus::Committed)
        fail(Errc::NotCommitted, "payment " + std::to_string(entry.payIndex) + " is locked or refunded");
    auto payees = decodePayData(payData, accounts_.size());
    auto occurrences = countOccurrences(payees, s.recipientId);
    if (occurrences == 0) fail(Errc::RecipientAbsent, "recipient not among payees");
    Amount owed = checkedMul(p.perDestinationAmount, occurrences);
    if (owed != entry.amount)
        fail(Errc::AmountMismatch, "payment pays " + std::to_string(owed) + ", entry claims " + std::to_string(entry.amount));

    s.state = GameState::ProofAccepted;
    s.deadlineBlock = block_;
    log_.append(record::Proof{delegateId, slotId, Bytes(payData.begin(), payData.end())});
}

void Ledger::challengeSuccess(AccountId delegateId, SlotId slotId) {
    auto& s = activeSlot(delegateId, slotId);
    if (s.state != GameState::ChallengeStarted && s.state != GameState::WaitingProof)
        fail(Errc::WrongState, slotName(delegateId, slotId) + " is " + std::string(gameStateName(s.state)));
    requireAtOrAfter(s);
    auto& challenger = accounts_[*s.challengerId];
    challenger.balance = checkedAdd(challenger.balance, checkedAdd(s.delegateStake, s.challengerStake));
    // Instant collects: the recipient keeps the fronted funds, the delegate is
    // not reimbursed, and lastCollectedPayIndex stays where collect put it.
    slots_.erase(SlotKey{delegateId, slotId});
    log_.append(record::ChallengeSuccess{delegateId, slotId});
}

void Ledger::challengeFailed(AccountId delegateId, SlotId slotId) {
    auto& s = activeSlot(delegateId, slotId);
    if (s.state == GameState::WaitingPaymentSelection) requireAtOrAfter(s);
    else if (s.state != GameState::ProofAccepted)
        fail(Errc::WrongState, slotName(delegateId, slotId) + " is " + std::string(gameStateName(s.state)));
    auto& delegate = accounts_[delegateId];
    auto credited = checkedAdd(delegate.balance, s.challengerStake);
    const auto deadline = checkedAdd(block_, params_.challengePeriod);

    delegate.balance = credited;
    s.challengerId.reset();
    s.challengerStake = 0;
    s.challengeList.reset();
    s.challengedEntry.reset();
    s.state = GameState::WaitingChallenge;
    s.deadlineBlock = deadline;
    log_.append(record::ChallengeFailed{delegateId, slotId});
}

}  // namespace batpay
