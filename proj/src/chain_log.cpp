#include "batpay/chain_log.hpp"

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"

namespace batpay {

namespace {

constexpr char kLogMagic[8] = {'B', 'A', 'T', 'P', 'A', 'Y', 'L', 'G'};
constexpr std::uint16_t kLogVersion = 1;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void putOptionalAddress(ByteWriter& w, const std::optional<Address>& a) {
    w.u8(a ? 1 : 0);
    if (a) w.fixed(*a);
}

std::optional<Address> getOptionalAddress(ByteReader& r) {
    auto flag = r.u8();
    if (flag > 1) fail(Errc::BadEncoding, "bad option flag");
    if (flag == 0) return std::nullopt;
    return r.fixed<Address>();
}

bool getBool(ByteReader& r) {
    auto v = r.u8();
    if (v > 1) fail(Errc::BadEncoding, "bad bool");
    return v == 1;
}

PayIndex headerPayIndex(const Record& rec) {
    return std::visit(Overloaded{
                          [](const record::Payment& p) { return p.payIndex; },
                          [](const record::Unlock& u) { return u.payIndex; },
                          [](const record::Refund& u) { return u.payIndex; },
                          [](const record::CollectOpen& c) { return c.request.lastPaymentIndex; },
                          [](const record::Selection& s) { return s.entry.payIndex; },
                          [](const auto&) { return PayIndex{0}; },
                      },
                      rec);
}

void encodeBody(ByteWriter& w, const Record& rec) {
    std::visit(Overloaded{
                   [&](const record::Instantiate& r) {
                       r.params.encode(w);
                       w.fixed(r.token);
                       w.fixed(r.instance);
                   },
                   [&](const record::Mint& r) {
                       w.fixed(r.to);
                       w.u64(r.amount);
                   },
                   [&](const record::AdvanceBlock& r) {
                       w.u64(r.count);
                       w.u64(r.newBlock);
                   },
                   [&](const record::Register& r) {
                       w.u32(r.id);
                       w.fixed(r.address);
                   },
                   [&](const record::Deposit& r) {
                       w.u32(r.target);
                       w.u32(r.resolvedId);
                       w.u64(r.amount);
                       w.fixed(r.from);
                   },
                   [&](const record::Withdraw& r) {
                       w.u32(r.id);
                       w.u64(r.amount);
                       w.fixed(r.to);
                   },
                   [&](const record::BulkRegister& r) {
                       w.u64(r.bulkId);
                       w.u32(r.firstId);
                       w.u32(r.count);
                       w.fixed(r.root);
                   },
                   [&](const record::ClaimBulkId& r) {
                       w.u64(r.bulkId);
                       w.u32(r.id);
                       w.fixed(r.address);
                       w.blob(r.proof.serialize());
                   },
                   [&](const record::Payment& r) {
                       w.u32(r.fromId);
                       w.u64(r.perDestination);
                       w.u64(r.unlockerFee);
                       w.u8(r.lockHash ? 1 : 0);
                       if (r.lockHash) w.fixed(*r.lockHash);
                       w.raw(r.payData);  // payData runs to the end of the record
                   },
                   [&](const record::Unlock& r) {
                       w.u32(r.unlockerId);
                       w.blob(r.key);
                   },
                   [&](const record::Refund&) {},
                   [&](const record::CollectOpen& r) {
                       w.u32(r.request.delegateId);
                       w.u16(r.request.slotId);
                       w.u32(r.request.recipientId);
                       w.u64(r.request.amount);
                       w.u64(r.request.fee);
                       putOptionalAddress(w, r.request.destination);
                       w.fixed(r.signature);
                       w.u64(r.startPayIndex);
                   },
                   [&](const record::Challenge& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                       w.u32(r.challengerId);
                   },
                   [&](const record::Response& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                       w.u32(static_cast<std::uint32_t>(r.entries.size()));
                       for (const auto& e : r.entries) {
                           w.u64(e.payIndex);
                           w.u64(e.amount);
                       }
                   },
                   [&](const record::Selection& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                       w.u64(r.entry.amount);
                   },
                   [&](const record::Proof& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                       w.raw(r.payData);
                   },
                   [&](const record::FreeSlot& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                   },
                   [&](const record::ChallengeSuccess& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                   },
                   [&](const record::ChallengeFailed& r) {
                       w.u32(r.delegateId);
                       w.u16(r.slotId);
                   },
               },
               rec);
}

Bytes rest(ByteReader& r) {
    auto v = r.raw(r.remaining());
    return Bytes(v.begin(), v.end());
}

}  // namespace

std::string_view recordTypeName(RecordType type) {
    switch (type) {
        case RecordType::Instantiate: return "instantiate";
        case RecordType::Mint: return "mint";
        case RecordType::AdvanceBlock: return "advance_block";
        case RecordType::Register: return "register";
        case RecordType::Deposit: return "deposit";
        case RecordType::Withdraw: return "withdraw";
        case RecordType::BulkRegister: return "bulk_register";
        case RecordType::ClaimBulkId: return "claim_bulk_id";
        case RecordType::Payment: return "payment";
        case RecordType::Unlock: return "unlock";
        case RecordType::Refund: return "refund";
        case RecordType::CollectOpen: return "collect";
        case RecordType::Challenge: return "challenge";
        case RecordType::Response: return "response";
        case RecordType::Selection: return "selection";
        case RecordType::Proof: return "proof";
        case RecordType::FreeSlot: return "free_slot";
        case RecordType::ChallengeSuccess: return "challenge_success";
        case RecordType::ChallengeFailed: return "challenge_failed";
    }
    return "unknown";
}

RecordType recordType(const Record& r) {
    static constexpr RecordType kByIndex[] = {
        RecordType::Instantiate, RecordType::Mint,         RecordType::AdvanceBlock, RecordType::Register,
        RecordType::Deposit,     RecordType::Withdraw,     RecordType::BulkRegister, RecordType::ClaimBulkId,
        RecordType::Payment,     RecordType::Unlock,       RecordType::Refund,       RecordType::CollectOpen,
        RecordType::Challenge,   RecordType::Response,     RecordType::Selection,    RecordType::Proof,
        RecordType::FreeSlot,    RecordType::ChallengeSuccess, RecordType::ChallengeFailed,
    };
    static_assert(std::size(kByIndex) == std::variant_size_v<Record>);
    return kByIndex[r.index()];
}

Bytes encodeRecord(const Record& r) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(recordType(r)));
    w.u64(headerPayIndex(r));
    encodeBody(w, r);
    return std::move(w).take();
}

Record decodeRecord(ByteView wire) {
    ByteReader r(wire);
    auto tag = static_cast<RecordType>(r.u8());
    PayIndex payIndex = r.u64();
    Record out;
    switch (tag) {
        case RecordType::Instantiate: {
            record::Instantiate v;
            v.params = Params::decode(r);
            v.token = r.fixed<Address>();
            v.instance = r.fixed<Address>();
            out = v;
            break;
        }
        case RecordType::Mint: {
            record::Mint v;
            v.to = r.fixed<Address>();
            v.amount = r.u64();
            out = v;
            break;
        }
        case RecordType::AdvanceBlock: {
            record::AdvanceBlock v;
            v.count = r.u64();
            v.newBlock = r.u64();
            out = v;
            break;
        }
        case RecordType::Register: {
            record::Register v;
            v.id = r.u32();
            v.address = r.fixed<Address>();
            out = v;
            break;
        }
        case RecordType::Deposit: {
            record::Deposit v;
            v.target = r.u32();
            v.resolvedId = r.u32();
            v.amount = r.u64();
            v.from = r.fixed<Address>();
            out = v;
            break;
        }
        case RecordType::Withdraw: {
            record::Withdraw v;
            v.id = r.u32();
            v.amount = r.u64();
            v.to = r.fixed<Address>();
            out = v;
            break;
        }
        case RecordType::BulkRegister: {
            record::BulkRegister v;
            v.bulkId = r.u64();
            v.firstId = r.u32();
            v.count = r.u32();
            v.root = r.fixed<Digest>();
            out = v;
            break;
        }
        case RecordType::ClaimBulkId: {
            record::ClaimBulkId v;
            v.bulkId = r.u64();
            v.id = r.u32();
            v.address = r.fixed<Address>();
            v.proof = MerkleProof::parse(r.blob());
            out = v;
            break;
        }
        case RecordType::Payment: {
            record::Payment v;
            v.payIndex = payIndex;
            v.fromId = r.u32();
            v.perDestination = r.u64();
            v.unlockerFee = r.u64();
            if (getBool(r)) v.lockHash = r.fixed<Digest>();
            v.payData = rest(r);
            out = v;
            break;
        }
        case RecordType::Unlock: {
            record::Unlock v;
            v.payIndex = payIndex;
            v.unlockerId = r.u32();
            v.key = r.blob();
            out = v;
            break;
        }
        case RecordType::Refund: out = record::Refund{payIndex}; break;
        case RecordType::CollectOpen: {
            record::CollectOpen v;
            v.request.lastPaymentIndex = payIndex;
            v.request.delegateId = r.u32();
            v.request.slotId = r.u16();
            v.request.recipientId = r.u32();
            v.request.amount = r.u64();
            v.request.fee = r.u64();
            v.request.destination = getOptionalAddress(r);
            v.signature = r.fixed<Signature>();
            v.startPayIndex = r.u64();
            out = v;
            break;
        }
        case RecordType::Challenge: {
            record::Challenge v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            v.challengerId = r.u32();
            out = v;
            break;
        }
        case RecordType::Response: {
            record::Response v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            auto n = r.u32();
            if (n > r.remaining() / 16) fail(Errc::BadEncoding, "response list longer than record");
            v.entries.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i) {
                ClaimEntry e;
                e.payIndex = r.u64();
                e.amount = r.u64();
                v.entries.push_back(e);
            }
            out = v;
            break;
        }
        case RecordType::Selection: {
            record::Selection v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            v.entry.payIndex = payIndex;
            v.entry.amount = r.u64();
            out = v;
            break;
        }
        case RecordType::Proof: {
            record::Proof v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            v.payData = rest(r);
            out = v;
            break;
        }
        case RecordType::FreeSlot: {
            record::FreeSlot v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            out = v;
            break;
        }
        case RecordType::ChallengeSuccess: {
            record::ChallengeSuccess v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            out = v;
            break;
        }
        case RecordType::ChallengeFailed: {
            record::ChallengeFailed v;
            v.delegateId = r.u32();
            v.slotId = r.u16();
            out = v;
            break;
        }
        default: fail(Errc::BadEncoding, "unknown record tag " + std::to_string(static_cast<int>(tag)));
    }
    r.expectEnd();
    if (headerPayIndex(out) != payIndex) fail(Errc::BadEncoding, "payIndex header must be 0 for this record type");
    return out;
}

Bytes ChainLog::serialize(const std::optional<Digest>& finalDigest) const {
    ByteWriter w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(kLogMagic), sizeof kLogMagic));
    w.u16(kLogVersion);
    w.u32(static_cast<std::uint32_t>(records_.size()));
    for (const auto& r : records_) w.blob(encodeRecord(r));
    w.u8(finalDigest ? 1 : 0);
    if (finalDigest) w.fixed(*finalDigest);
    return std::move(w).take();
}

ChainLog::Parsed ChainLog::parse(ByteView file) {
    ByteReader r(file);
    auto magic = r.raw(sizeof kLogMagic);
    if (!std::equal(magic.begin(), magic.end(), reinterpret_cast<const std::uint8_t*>(kLogMagic)))
        fail(Errc::BadEncoding, "not a chain log file");
    if (auto v = r.u16(); v != kLogVersion) fail(Errc::BadEncoding, "unsupported log version " + std::to_string(v));
    Parsed out;
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) out.log.append(decodeRecord(r.blob()));
    if (getBool(r)) out.finalDigest = r.fixed<Digest>();
    r.expectEnd();
    return out;
}

}  // namespace batpay
