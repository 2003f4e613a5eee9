#include "batpay/replay.hpp"

#include "batpay/error.hpp"
#include "batpay/paydata.hpp"

namespace batpay {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Address addressOf(const Ledger& l, AccountId id) {
    const auto& acc = l.account(id);
    if (!acc.address) fail(Errc::UnclaimedAccount, "replay: account " + std::to_string(id) + " has no address");
    return *acc.address;
}

void expect(bool ok, const std::string& what) {
    if (!ok) fail(Errc::InvariantViolation, "replay diverged: " + what);
}

}  // namespace

ReplayResult replayChainLog(const ChainLog& log, const std::optional<Digest>& expected) {
    if (log.empty()) fail(Errc::BadEncoding, "empty chain log");
    const auto* init = std::get_if<record::Instantiate>(&log[0]);
    if (init == nullptr) fail(Errc::BadEncoding, "chain log must start with an instantiate record");
    auto ledger = std::make_unique<Ledger>(init->params, TokenAdapter(init->token), AuthMode::TrustLog);
    expect(ledger->instanceAddress() == init->instance, "instance address");
    auto& l = *ledger;

    for (std::size_t i = 1; i < log.size(); ++i) {
        std::visit(Overloaded{
                       [&](const record::Instantiate&) { fail(Errc::BadEncoding, "duplicate instantiate record"); },
                       [&](const record::Mint& r) { l.mintExternal(r.to, r.amount); },
                       [&](const record::AdvanceBlock& r) {
                           expect(l.advanceBlock(r.count) == r.newBlock, "block number");
                       },
                       [&](const record::Register& r) { expect(l.registerAccount(r.address) == r.id, "register id"); },
                       [&](const record::Deposit& r) {
                           expect(l.deposit(r.target, r.amount, r.from) == r.resolvedId, "deposit id");
                       },
                       [&](const record::Withdraw& r) { l.withdraw(addressOf(l, r.id), r.id, r.amount, r.to); },
                       [&](const record::BulkRegister& r) {
                           expect(l.bulkRegister(r.count, r.root) == r.bulkId, "bulk id");
                       },
                       [&](const record::ClaimBulkId& r) {
                           l.claimBulkRegistrationId(r.bulkId, r.id, r.address, r.proof);
                       },
                       [&](const record::Payment& r) {
                           auto payees = decodePayData(r.payData);
                           auto idx = l.registerPayment(addressOf(l, r.fromId), r.fromId, r.perDestination, payees,
                                                        r.lockHash, r.unlockerFee);
                           expect(idx == r.payIndex, "payIndex");
                       },
                       [&](const record::Unlock& r) {
                           l.unlock(addressOf(l, r.unlockerId), r.payIndex, r.unlockerId, r.key);
                       },
                       [&](const record::Refund& r) { l.refundLockedPayment(r.payIndex); },
                       [&](const record::CollectOpen& r) {
                           expect(l.account(r.request.recipientId).lastCollectedPayIndex == r.startPayIndex,
                                  "collect start index");
                           l.collect(addressOf(l, r.request.delegateId), r.request, r.signature);
                       },
                       [&](const record::Challenge& r) {
                           l.challenge(addressOf(l, r.challengerId), r.delegateId, r.slotId, r.challengerId);
                       },
                       [&](const record::Response& r) {
                           l.respondWithPaymentList(addressOf(l, r.delegateId), r.delegateId, r.slotId, r.entries);
                       },
                       [&](const record::Selection& r) {
                           const auto* s = l.slot(r.delegateId, r.slotId);
                           if (s == nullptr || !s->challengerId) fail(Errc::UnknownSlot, "replay: selection on idle slot");
                           l.selectPayment(addressOf(l, *s->challengerId), r.delegateId, r.slotId, r.entry);
                       },
                       [&](const record::Proof& r) {
                           l.provePaymentInclusion(addressOf(l, r.delegateId), r.delegateId, r.slotId, r.payData);
                       },
                       [&](const record::FreeSlot& r) { l.freeSlot(r.delegateId, r.slotId); },
                       [&](const record::ChallengeSuccess& r) { l.challengeSuccess(r.delegateId, r.slotId); },
                       [&](const record::ChallengeFailed& r) { l.challengeFailed(r.delegateId, r.slotId); },
                   },
                   log[i]);
    }

    ReplayResult out;
    out.finalDigest = l.stateDigest();
    if (expected) out.digestMatches = (*expected == out.finalDigest);
    out.ledger = std::move(ledger);
    return out;
}

}  // namespace batpay
