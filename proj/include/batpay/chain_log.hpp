#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "batpay/merkle.hpp"
#include "batpay/params.hpp"
#include "batpay/types.hpp"

namespace batpay {

// One (payIndex, amount) pair of a delegate's challenge response.
struct ClaimEntry {
    PayIndex payIndex = 0;
    Amount amount = 0;
    bool operator==(const ClaimEntry&) const = default;
};

// Everything the recipient signs to authorize a collect.
struct CollectRequest {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    AccountId recipientId = 0;
    PayIndex lastPaymentIndex = 0;
    Amount amount = 0;
    Amount fee = 0;
    std::optional<Address> destination;
    bool operator==(const CollectRequest&) const = default;
};

enum class RecordType : std::uint8_t {
    Instantiate = 0x01,
    Mint = 0x02,
    AdvanceBlock = 0x03,
    Register = 0x10,
    Deposit = 0x11,
    Withdraw = 0x12,
    BulkRegister = 0x13,
    ClaimBulkId = 0x14,
    Payment = 0x20,
    Unlock = 0x21,
    Refund = 0x22,
    CollectOpen = 0x30,
    Challenge = 0x31,
    Response = 0x32,
    Selection = 0x33,
    Proof = 0x34,
    FreeSlot = 0x35,
    ChallengeSuccess = 0x36,
    ChallengeFailed = 0x37,
};

std::string_view recordTypeName(RecordType type);

// Public chain history. Each record is an accepted transaction (inputs plus
// the derived values an event would carry), so the log alone is enough to
// replay the protocol or recompute every balance.
namespace record {

struct Instantiate {
    Params params;
    Address token;
    Address instance;
    bool operator==(const Instantiate&) const = default;
};
struct Mint {
    Address to;
    Amount amount = 0;
    bool operator==(const Mint&) const = default;
};
struct AdvanceBlock {
    BlockNumber count = 0;
    BlockNumber newBlock = 0;
    bool operator==(const AdvanceBlock&) const = default;
};
struct Register {
    AccountId id = 0;
    Address address;
    bool operator==(const Register&) const = default;
};
struct Deposit {
    AccountId target = 0;  // kNewAccount or an existing ID
    AccountId resolvedId = 0;
    Amount amount = 0;
    Address from;
    bool operator==(const Deposit&) const = default;
};
struct Withdraw {
    AccountId id = 0;
    Amount amount = 0;
    Address to;
    bool operator==(const Withdraw&) const = default;
};
struct BulkRegister {
    std::uint64_t bulkId = 0;
    AccountId firstId = 0;
    std::uint32_t count = 0;
    Digest root;
    bool operator==(const BulkRegister&) const = default;
};
struct ClaimBulkId {
    std::uint64_t bulkId = 0;
    AccountId id = 0;
    Address address;
    MerkleProof proof;
    bool operator==(const ClaimBulkId&) const = default;
};
struct Payment {
    PayIndex payIndex = 0;
    AccountId fromId = 0;
    Amount perDestination = 0;
    Amount unlockerFee = 0;
    std::optional<Digest> lockHash;
    Bytes payData;
    bool operator==(const Payment&) const = default;
};
struct Unlock {
    PayIndex payIndex = 0;
    AccountId unlockerId = 0;
    Bytes key;
    bool operator==(const Unlock&) const = default;
};
struct Refund {
    PayIndex payIndex = 0;
    bool operator==(const Refund&) const = default;
};
struct CollectOpen {
    CollectRequest request;
    PayIndex startPayIndex = 0;
    Signature signature;
    bool operator==(const CollectOpen&) const = default;
};
struct Challenge {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    AccountId challengerId = 0;
    bool operator==(const Challenge&) const = default;
};
struct Response {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    std::vector<ClaimEntry> entries;
    bool operator==(const Response&) const = default;
};
struct Selection {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    ClaimEntry entry;
    bool operator==(const Selection&) const = default;
};
struct Proof {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    Bytes payData;
    bool operator==(const Proof&) const = default;
};
struct FreeSlot {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    bool operator==(const FreeSlot&) const = default;
};
struct ChallengeSuccess {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    bool operator==(const ChallengeSuccess&) const = default;
};
struct ChallengeFailed {
    AccountId delegateId = 0;
    SlotId slotId = 0;
    bool operator==(const ChallengeFailed&) const = default;
};

}  // namespace record

using Record = std::variant<record::Instantiate, record::Mint, record::AdvanceBlock, record::Register,
                            record::Deposit, record::Withdraw, record::BulkRegister, record::ClaimBulkId,
                            record::Payment, record::Unlock, record::Refund, record::CollectOpen,
                            record::Challenge, record::Response, record::Selection, record::Proof,
                            record::FreeSlot, record::ChallengeSuccess, record::ChallengeFailed>;

RecordType recordType(const Record& r);

// Record wire form: type tag (1 byte), payIndex (u64 LE), type-specific body.
// Records without a natural payment index carry 0 there; CollectOpen carries
// lastPaymentIndex and Selection the selected payIndex.
Bytes encodeRecord(const Record& r);
Record decodeRecord(ByteView wire);

class ChainLog {
public:
    void append(Record r) { records_.push_back(std::move(r)); }

    [[nodiscard]] const std::vector<Record>& records() const { return records_; }
    [[nodiscard]] std::size_t size() const { return records_.size(); }
    [[nodiscard]] bool empty() const { return records_.empty(); }
    [[nodiscard]] const Record& operator[](std::size_t i) const { return records_[i]; }

    // File form: "BATPAYLG", u16 version, u32 record count, length-prefixed
    // records, then a u8 flag and the optional 32-byte final state digest.
    [[nodiscard]] Bytes serialize(const std::optional<Digest>& finalDigest = std::nullopt) const;

    struct Parsed;
    static Parsed parse(ByteView file);

private:
    std::vector<Record> records_;
};

struct ChainLog::Parsed {
    ChainLog log;
    std::optional<Digest> finalDigest;
};

}  // namespace batpay
