#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "batpay/chain_log.hpp"
#include "batpay/identity.hpp"
#include "batpay/merkle.hpp"
#include "batpay/params.hpp"
#include "batpay/token.hpp"
#include "batpay/types.hpp"

namespace batpay {

struct Account {
    AccountId id = 0;
    std::optional<Address> address;  // unset while a bulk-reserved ID is unclaimed
    Amount balance = 0;
    PayIndex lastCollectedPayIndex = 0;
    bool operator==(const Account&) const = default;
};

enum class PaymentStatus : std::uint8_t { Committed = 0, Locked = 1, Refunded = 2 };

struct Payment {
    PayIndex payIndex = 0;
    AccountId fromId = 0;
    Amount perDestinationAmount = 0;
    std::uint32_t payeeCount = 0;
    Digest payDataDigest;
    Amount totalEscrow = 0;
    std::optional<Digest> lockingKeyHash;
    Amount unlockerFee = 0;
    PaymentStatus status = PaymentStatus::Committed;
    BlockNumber registeredAtBlock = 0;
    BlockNumber collectableFromBlock = 0;
    bool operator==(const Payment&) const = default;
};

struct BulkRegistration {
    std::uint64_t bulkId = 0;
    Digest rootHash;
    AccountId firstReservedId = 0;
    std::uint32_t count = 0;
    BlockNumber registeredAtBlock = 0;
    bool operator==(const BulkRegistration&) const = default;
};

// Numbering follows the collect game diagram.
enum class GameState : std::uint8_t {
    Empty = 0,
    WaitingChallenge = 1,
    ChallengeStarted = 2,
    WaitingPaymentSelection = 3,
    WaitingProof = 4,
    ProofAccepted = 5,
};

std::string_view gameStateName(GameState s);

struct CollectSlot {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    AccountId recipientId = 0;
    PayIndex startPayIndex = 0;  // exclusive
    PayIndex endPayIndex = 0;    // inclusive
    Amount amount = 0;
    Amount fee = 0;
    std::optional<Address> destination;
    GameState state = GameState::Empty;
    BlockNumber deadlineBlock = 0;
    Amount delegateStake = 0;
    std::optional<AccountId> challengerId;
    Amount challengerStake = 0;
    std::optional<std::vector<ClaimEntry>> challengeList;
    std::optional<ClaimEntry> challengedEntry;
    bool instant = false;
    // Tokens the delegate fronted to the recipient on an instant collect.
    // They already sit in the recipient's balance; this only records what the
    // delegate is owed on successful settlement.
    Amount advanced = 0;
    bool operator==(const CollectSlot&) const = default;
};

struct SlotKey {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    auto operator<=>(const SlotKey&) const = default;
};

// Canonical message a recipient signs to authorize a collect: the instance
// address followed by every collect argument in call order.
Bytes collectAuthorizationMessage(const Address& instance, const CollectRequest& req);

// H(unlockerId u32 LE || key)
Digest lockingKeyHash(AccountId unlockerId, ByteView key);

enum class AuthMode {
    Verify,    // check collect signatures against the keyring
    TrustLog,  // replaying an already-accepted history; signatures are not re-checked
};

/// Protocol state of one instance: parameters, account table, payment log,
/// bulk registrations, collect slots, token reserve and block clock.
///
/// Operations are transactional: they validate everything first and either
/// apply all effects and append one record to the chain log, or throw
/// ProtocolError and leave the state untouched. Not thread-safe; one owner
/// mutates it at a time.
class Ledger {
public:
    // Throws ProtocolError(InvalidParams) if `params` is invalid.
    Ledger(Params params, TokenAdapter token, AuthMode mode = AuthMode::Verify);

    // --- core state -------------------------------------------------------
    [[nodiscard]] const Params& params() const { return params_; }
    [[nodiscard]] const Address& instanceAddress() const { return instance_; }
    [[nodiscard]] BlockNumber currentBlock() const { return block_; }
    [[nodiscard]] const TokenAdapter& token() const { return token_; }
    [[nodiscard]] const ChainLog& chainLog() const { return log_; }
    [[nodiscard]] AuthMode authMode() const { return authMode_; }

    void enroll(const Identity& id) { keyring_.enroll(id); }
    // External ERC20 faucet; not a protocol operation, logged for replay.
    void mintExternal(const Address& to, Amount amount);

    // `target` is an existing ID or kNewAccount. Tokens come from `from`.
    AccountId deposit(AccountId target, Amount amount, const Address& from);
    Amount withdraw(const Address& sender, AccountId id, Amount amount, const Address& to);
    BlockNumber advanceBlock(BlockNumber n);

    [[nodiscard]] std::size_t accountCount() const { return accounts_.size(); }
    [[nodiscard]] const Account& account(AccountId id) const;
    [[nodiscard]] const std::vector<Account>& accounts() const { return accounts_; }

    // --- registration -----------------------------------------------------
    AccountId registerAccount(const Address& address);
    std::uint64_t bulkRegister(std::uint32_t count, const Digest& rootHash);
    void claimBulkRegistrationId(std::uint64_t bulkId, AccountId id, const Address& address,
                                 const MerkleProof& proof);
    [[nodiscard]] const BulkRegistration& bulkRegistration(std::uint64_t bulkId) const;
    [[nodiscard]] const std::vector<BulkRegistration>& bulkRegistrations() const { return bulks_; }

    // --- payments ---------------------------------------------------------
    PayIndex registerPayment(const Address& sender, AccountId fromId, Amount perDestination,
                             std::span<const AccountId> payees,
                             const std::optional<Digest>& lockHash = std::nullopt, Amount unlockerFee = 0);
    void unlock(const Address& sender, PayIndex payIndex, AccountId unlockerId, ByteView key);
    void refundLockedPayment(PayIndex payIndex);

    [[nodiscard]] std::size_t paymentCount() const { return payments_.size(); }
    // payIndex is 1-based; index 0 means "nothing collected yet".
    [[nodiscard]] const Payment& payment(PayIndex payIndex) const;
    [[nodiscard]] const std::vector<Payment>& payments() const { return payments_; }
    // Highest payIndex whose unlock window has elapsed (0 if none).
    [[nodiscard]] PayIndex latestCollectablePayIndex() const;

    // --- collect game -----------------------------------------------------
    void collect(const Address& sender, const CollectRequest& req, const Signature& signature);
    void freeSlot(AccountId delegateId, SlotId slotId);
    void challenge(const Address& sender, AccountId delegateId, SlotId slotId, AccountId challengerId);
    void respondWithPaymentList(const Address& sender, AccountId delegateId, SlotId slotId,
                                std::span<const ClaimEntry> entries);
    void selectPayment(const Address& sender, AccountId delegateId, SlotId slotId, const ClaimEntry& entry);
    void provePaymentInclusion(const Address& sender, AccountId delegateId, SlotId slotId, ByteView payData);
    void challengeSuccess(AccountId delegateId, SlotId slotId);
    void challengeFailed(AccountId delegateId, SlotId slotId);

    // Empty slots are not stored; returns nullptr for them.
    [[nodiscard]] const CollectSlot* slot(AccountId delegateId, SlotId slotId) const;
    [[nodiscard]] const std::map<SlotKey, CollectSlot>& slots() const { return slots_; }

    // --- audit ------------------------------------------------------------
    // Tokens escrowed by registered payments and not yet paid out.
    [[nodiscard]] Amount escrowOutstanding() const { return escrow_; }

    // Canonical state serialization (chain log and keyring excluded). The
    // block number occupies bytes [8, 16).
    [[nodiscard]] Bytes canonicalBytes() const;
    [[nodiscard]] Digest stateDigest() const;

    // Full re-summation of the conservation invariant plus every type
    // invariant. Returns a description of the first violation found.
    [[nodiscard]] std::optional<std::string> findInvariantViolation() const;
    // Throws ProtocolError(InvariantViolation) on violation.
    void assertInvariants() const;

private:
    Account& mutableAccount(AccountId id);
    const Account& claimedAccount(AccountId id) const;
    void requireSender(const Account& acc, const Address& sender, const char* role) const;
    void ensureCapacity(std::uint64_t extra) const;
    CollectSlot& activeSlot(AccountId delegateId, SlotId slotId);
    void requireBefore(const CollectSlot& s) const;
    void requireAtOrAfter(const CollectSlot& s) const;
    Payment& mutablePayment(PayIndex payIndex);

    Params params_;
    TokenAdapter token_;
    AuthMode authMode_;
    Address instance_;
    Keyring keyring_;
    BlockNumber block_ = 0;
    std::vector<Account> accounts_;
    std::vector<Payment> payments_;
    std::vector<BulkRegistration> bulks_;
    std::map<SlotKey, CollectSlot> slots_;
    Amount escrow_ = 0;
    // Gross collect amounts paid out of escrow; used by the re-summation.
    Amount drawnFromEscrow_ = 0;
    ChainLog log_;
};

}  // namespace batpay
