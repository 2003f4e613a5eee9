#include "batpay/ledger.hpp"

#include <algorithm>

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"
#include "batpay/hash.hpp"

namespace batpay {

namespace {

Address deriveInstanceAddress(const Address& token, const Params& params) {
    ByteWriter w;
    params.encode(w);
    auto h = Sha256().update("batpay/instance").update(token.view()).update(w.bytes()).finish();
    Address out;
    std::copy_n(h.bytes.begin(), Address::size(), out.bytes.begin());
    return out;
}

}  // namespace

std::string_view gameStateName(GameState s) {
    switch (s) {
        case GameState::Empty: return "empty";
        case GameState::WaitingChallenge: return "waiting-challenge";
        case GameState::ChallengeStarted: return "challenge-started";
        case GameState::WaitingPaymentSelection: return "waiting-payment-selection";
        case GameState::WaitingProof: return "waiting-proof";
        case GameState::ProofAccepted: return "proof-accepted";
    }
    return "unknown";
}

Ledger::Ledger(Params params, TokenAdapter token, AuthMode mode)
    : params_(params), token_(std::move(token)), authMode_(mode) {
    params_.validate();
    instance_ = deriveInstanceAddress(token_.tokenAddress(), params_);
    log_.append(record::Instantiate{params_, token_.tokenAddress(), instance_});
}

void Ledger::mintExternal(const Address& to, Amount amount) {
    if (amount == 0) fail(Errc::InvalidArgument, "mint amount must be positive");
    token_.mint(to, amount);
    log_.append(record::Mint{to, amount});
}

const Account& Ledger::account(AccountId id) const {
    if (id >= accounts_.size()) fail(Errc::UnknownAccount, "account " + std::to_string(id));
    return accounts_[id];
}

Account& Ledger::mutableAccount(AccountId id) {
    if (id >= accounts_.size()) fail(Errc::UnknownAccount, "account " + std::to_string(id));
    return accounts_[id];
}

const Account& Ledger::claimedAccount(AccountId id) const {
    const auto& acc = account(id);
    if (!acc.address) fail(Errc::UnclaimedAccount, "account " + std::to_string(id) + " is reserved but unclaimed");
    return acc;
}

void Ledger::requireSender(const Account& acc, const Address& sender, const char* role) const {
    if (!acc.address || *acc.address != sender)
        fail(Errc::Unauthorized, std::string(role) + " " + std::to_string(acc.id) + " not controlled by sender");
}

void Ledger::ensureCapacity(std::uint64_t extra) const {
    if (accounts_.size() + extra > params_.maxAccountCount)
        fail(Errc::AccountTableFull, std::to_string(accounts_.size()) + " + " + std::to_string(extra) + " > " +
                                         std::to_string(params_.maxAccountCount));
}

AccountId Ledger::deposit(AccountId target, Amount amount, const Address& from) {
    if (amount == 0) fail(Errc::InvalidArgument, "deposit amount must be positive");
    if (token_.balanceOf(from) < amount)
        fail(Errc::InsufficientFunds, "external balance below deposit of " + std::to_string(amount));
    checkedAdd(token_.reserve(), amount);

    AccountId id;
    if (target == kNewAccount) {
        ensureCapacity(1);
        id = static_cast<AccountId>(accounts_.size());
        token_.pull(from, amount);
        accounts_.push_back(Account{id, from, amount, 0});
    } else {
        const auto& acc = claimedAccount(target);
        auto next = checkedAdd(acc.balance, amount);
        id = target;
        token_.pull(from, amount);
        accounts_[id].balance = next;
    }
    log_.append(record::Deposit{target, id, amount, from});
    return id;
}

Amount Ledger::withdraw(const Address& sender, AccountId id, Amount amount, const Address& to) {
    const auto& acc = claimedAccount(id);
    requireSender(acc, sender, "account");
    if (amount == 0) fail(Errc::InvalidArgument, "withdraw amount must be positive");
    if (amount > acc.balance)
        fail(Errc::InsufficientFunds, "withdraw " + std::to_string(amount) + " > balance " + std::to_string(acc.balance));
    checkedAdd(token_.balanceOf(to), amount);
    token_.push(to, amount);
    accounts_[id].balance -= amount;
    log_.append(record::Withdraw{id, amount, to});
    return accounts_[id].balance;
}

BlockNumber Ledger::advanceBlock(BlockNumber n) {
    if (n == 0) fail(Errc::InvalidArgument, "advance must be at least one block");
    block_ = checkedAdd(block_, n);
    log_.append(record::AdvanceBlock{n, block_});
    return block_;
}

Bytes Ledger::canonicalBytes() const {
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>("BATPAYST"), 8));
    w.u64(block_);
    params_.encode(w);
    w.fixed(instance_);
    w.fixed(token_.tokenAddress());
    w.u64(token_.reserve());
    w.u64(token_.minted());
    w.u32(static_cast<std::uint32_t>(token_.externalBalances().size()));
    for (const auto& [addr, bal] : token_.externalBalances()) {
        w.fixed(addr);
        w.u64(bal);
    }
    w.u32(static_cast<std::uint32_t>(accounts_.size()));
    for (const auto& a : accounts_) {
        w.u32(a.id);
        w.u8(a.address ? 1 : 0);
        if (a.address) w.fixed(*a.address);
        w.u64(a.balance);
        w.u64(a.lastCollectedPayIndex);
    }
    w.u32(static_cast<std::uint32_t>(payments_.size()));
    for (const auto& p : payments_) {
        w.u64(p.payIndex);
        w.u32(p.fromId);
        w.u64(p.perDestinationAmount);
        w.u32(p.payeeCount);
        w.fixed(p.payDataDigest);
        w.u64(p.totalEscrow);
        w.u8(p.lockingKeyHash ? 1 : 0);
        if (p.lockingKeyHash) w.fixed(*p.lockingKeyHash);
        w.u64(p.unlockerFee);
        w.u8(static_cast<std::uint8_t>(p.status));
        w.u64(p.registeredAtBlock);
        w.u64(p.collectableFromBlock);
    }
    w.u32(static_cast<std::uint32_t>(bulks_.size()));
    for (const auto& b : bulks_) {
        w.u64(b.bulkId);
        w.fixed(b.rootHash);
        w.u32(b.firstReservedId);
        w.u32(b.count);
        w.u64(b.registeredAtBlock);
    }
    w.u32(static_cast<std::uint32_t>(slots_.size()));
    for (const auto& [key, s] : slots_) {
        w.u32(s.delegateId);
        w.u16(s.slotId);
        w.u32(s.recipientId);
        w.u64(s.startPayIndex);
        w.u64(s.endPayIndex);
        w.u64(s.amount);
        w.u64(s.fee);
        w.u8(s.destination ? 1 : 0);
        if (s.destination) w.fixed(*s.destination);
        w.u8(static_cast<std::uint8_t>(s.state));
        w.u64(s.deadlineBlock);
        w.u64(s.delegateStake);
        w.u8(s.challengerId ? 1 : 0);
        if (s.challengerId) w.u32(*s.challengerId);
        w.u64(s.challengerStake);
        w.u8(s.challengeList ? 1 : 0);
        if (s.challengeList) {
            w.u32(static_cast<std::uint32_t>(s.challengeList->size()));
            for (const auto& e : *s.challengeList) {
                w.u64(e.payIndex);
                w.u64(e.amount);
            }
        }
        w.u8(s.challengedEntry ? 1 : 0);
        if (s.challengedEntry) {
            w.u64(s.challengedEntry->payIndex);
            w.u64(s.challengedEntry->amount);
        }
        w.u8(s.instant ? 1 : 0);
        w.u64(s.advanced);
    }
    w.u64(escrow_);
    w.u64(drawnFromEscrow_);
    return std::move(w).take();
}

Digest Ledger::stateDigest() const { return sha256(canonicalBytes()); }

std::optional<std::string> Ledger::findInvariantViolation() const {
    auto sum = [](Amount& acc, Amount v) -> bool { return !__builtin_add_overflow(acc, v, &acc); };

    // Type invariants.
    for (std::size_t i = 0; i < accounts_.size(); ++i) {
        const auto& a = accounts_[i];
        if (a.id != i) return "Account.id: table position " + std::to_string(i) + " holds id " + std::to_string(a.id);
        if (a.lastCollectedPayIndex > payments_.size())
            return "Account.lastCollectedPayIndex: account " + std::to_string(i) + " past end of payment log";
    }
    if (accounts_.size() > params_.maxAccountCount) return "Params.maxAccountCount: account table overfull";
    BlockNumber prevBlock = 0;
    Amount openEscrow = 0;
    for (std::size_t i = 0; i < payments_.size(); ++i) {
        const auto& p = payments_[i];
        if (p.payIndex != i + 1) return "Payment.payIndex: log position mismatch at " + std::to_string(i);
        if (p.registeredAtBlock < prevBlock) return "Payment.registeredAtBlock: not monotone";
        prevBlock = p.registeredAtBlock;
        if (p.collectableFromBlock != p.registeredAtBlock + params_.unlockPeriod)
            return "Payment.collectableFromBlock: payment " + std::to_string(p.payIndex);
        Amount expect = 0;
        if (__builtin_mul_overflow(p.perDestinationAmount, Amount{p.payeeCount}, &expect) ||
            !sum(expect, p.unlockerFee) || expect != p.totalEscrow)
            return "Payment.totalEscrow: payment " + std::to_string(p.payIndex);
        if (!p.lockingKeyHash && p.unlockerFee != 0) return "Payment.unlockerFee: fee on unlocked payment";
        if (!p.lockingKeyHash && p.status != PaymentStatus::Committed)
            return "Payment.status: unlocked payment not committed";
        switch (p.status) {
            case PaymentStatus::Locked:
                if (!sum(openEscrow, p.totalEscrow)) return "conservation: escrow overflow";
                break;
            case PaymentStatus::Committed:
                if (!sum(openEscrow, p.totalEscrow - p.unlockerFee)) return "conservation: escrow overflow";
                break;
            case PaymentStatus::Refunded: break;
        }
    }
    if (openEscrow < drawnFromEscrow_) return "conservation: collects drew more than was escrowed";
    if (openEscrow - drawnFromEscrow_ != escrow_)
        return "conservation: tracked escrow " + std::to_string(escrow_) + " != recomputed " +
               std::to_string(openEscrow - drawnFromEscrow_);

    Amount held = 0;
    for (const auto& [key, s] : slots_) {
        auto where = "CollectSlot(" + std::to_string(key.delegateId) + "," + std::to_string(key.slotId) + ")";
        if (s.state == GameState::Empty) return where + ".state: empty slot stored";
        if (s.delegateId != key.delegateId || s.slotId != key.slotId) return where + ": key mismatch";
        if (!(s.startPayIndex < s.endPayIndex && s.endPayIndex <= payments_.size()))
            return where + ".range: start < end <= latest payIndex violated";
        if (s.amount < s.fee) return where + ".fee: exceeds amount";
        bool listExpected = s.state >= GameState::WaitingPaymentSelection;
        if (s.challengeList.has_value() != listExpected) return where + ".challengeList: presence does not match state";
        bool entryExpected = s.state >= GameState::WaitingProof;
        if (s.challengedEntry.has_value() != entryExpected)
            return where + ".challengedEntry: presence does not match state";
        bool challenged = s.state >= GameState::ChallengeStarted;
        if (s.challengerId.has_value() != challenged) return where + ".challengerId: presence does not match state";
        if (s.instant != (s.slotId > params_.instantSlotThreshold)) return where + ".instant: slot id mismatch";
        if (s.delegateStake != params_.collectStake) return where + ".delegateStake";
        if (s.challengerStake != (challenged ? params_.challengeStake : 0)) return where + ".challengerStake";
        if (!sum(held, s.delegateStake) || !sum(held, s.challengerStake)) return "conservation: stake overflow";
    }

    Amount balances = 0;
    for (const auto& a : accounts_)
        if (!sum(balances, a.balance)) return "conservation: balance sum overflow";
    Amount expected = balances;
    if (!sum(expected, escrow_) || !sum(expected, held)) return "conservation: total overflow";
    if (token_.reserve() != expected)
        return "conservation: reserve " + std::to_string(token_.reserve()) + " != balances " + std::to_string(balances) +
               " + escrow " + std::to_string(escrow_) + " + held " + std::to_string(held);

    Amount supply = token_.reserve();
    for (const auto& [_, v] : token_.externalBalances())
        if (!sum(supply, v)) return "TokenAdapter: supply overflow";
    if (supply != token_.minted()) return "TokenAdapter: supply " + std::to_string(supply) + " != minted";
    return std::nullopt;
}

void Ledger::assertInvariants() const {
    if (auto v = findInvariantViolation()) fail(Errc::InvariantViolation, *v);
}

}  // namespace batpay
