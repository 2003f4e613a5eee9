#include "batpay/error.hpp"
#include "batpay/ledger.hpp"

namespace batpay {

AccountId Ledger::registerAccount(const Address& address) {
    ensureCapacity(1);
    auto id = static_cast<AccountId>(accounts_.size());
    accounts_.push_back(Account{id, address, 0, 0});
    log_.append(record::Register{id, address});
    return id;
}

std::uint64_t Ledger::bulkRegister(std::uint32_t count, const Digest& rootHash) {
    if (count == 0) fail(Errc::InvalidArgument, "bulk registration needs count >= 1");
    ensureCapacity(count);
    BulkRegistration bulk;
    bulk.bulkId = bulks_.size();
    bulk.rootHash = rootHash;
    bulk.firstReservedId = static_cast<AccountId>(accounts_.size());
    bulk.count = count;
    bulk.registeredAtBlock = block_;
    accounts_.reserve(accounts_.size() + count);
    for (std::uint32_t i = 0; i < count; ++i)
        accounts_.push_back(Account{bulk.firstReservedId + i, std::nullopt, 0, 0});
    bulks_.push_back(bulk);
    log_.append(record::BulkRegister{bulk.bulkId, bulk.firstReservedId, count, rootHash});
    return bulk.bulkId;
}

const BulkRegistration& Ledger::bulkRegistration(std::uint64_t bulkId) const {
    if (bulkId >= bulks_.size()) fail(Errc::UnknownBulk, "bulk " + std::to_string(bulkId));
    return bulks_[bulkId];
}

void Ledger::claimBulkRegistrationId(std::uint64_t bulkId, AccountId id, const Address& address,
                                     const MerkleProof& proof) {
    const auto& bulk = bulkRegistration(bulkId);
    if (id < bulk.firstReservedId || id - bulk.firstReservedId >= bulk.count)
        fail(Errc::OutOfRange, "account " + std::to_string(id) + " outside bulk " + std::to_string(bulkId));
    const auto& acc = account(id);
    if (acc.address) fail(Errc::AlreadyClaimed, "account " + std::to_string(id));
    if (proof.leafIndex != id - bulk.firstReservedId)
        fail(Errc::BadProof, "proof leaf index " + std::to_string(proof.leafIndex) + " does not match account offset");
    if (!verifyMerkleProof(bulk.rootHash, address, proof, bulk.count))
        fail(Errc::BadProof, "proof does not verify against bulk root");
    accounts_[id].address = address;
    log_.append(record::ClaimBulkId{bulkId, id, address, proof});
}

}  // namespace batpay
