#include "batpay/cost_model.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "batpay/error.hpp"
#include "batpay/identity.hpp"
#include "batpay/ledger.hpp"
#include "batpay/paydata.hpp"

namespace batpay {

namespace {

struct OpInfo {
    OpKind kind;
    std::string_view name;
    std::uint32_t storageWrites;
    Gas fixed;  // default per-op fixed cost; anchored kinds are re-solved
};

constexpr OpInfo kOps[] = {
    {OpKind::Register, "register", 2, 20000},
    {OpKind::Deposit, "deposit", 2, 25000},
    {OpKind::Withdraw, "withdraw", 1, 15000},
    {OpKind::BulkRegister, "bulk_register", 3, 30000},
    {OpKind::ClaimBulkId, "claim_bulk_id", 1, 12000},
    {OpKind::RegisterPayment, "register_payment", 4, 0},
    {OpKind::Unlock, "unlock", 2, 10000},
    {OpKind::Refund, "refund", 2, 8000},
    {OpKind::Collect, "collect", 6, 0},
    {OpKind::FreeSlot, "free_slot", 3, 15000},
    {OpKind::Challenge, "challenge", 3, 12000},
    {OpKind::RespondList, "respond_list", 2, 10000},
    {OpKind::SelectPayment, "select_payment", 2, 8000},
    {OpKind::ProvePayment, "prove_payment", 1, 15000},
    {OpKind::ChallengeSuccess, "challenge_success", 2, 10000},
    {OpKind::ChallengeFailed, "challenge_failed", 3, 10000},
};

const OpInfo& info(OpKind k) {
    for (const auto& o : kOps)
        if (o.kind == k) return o;
    throw std::logic_error("unhandled op kind");
}

Gas ceilDiv(Gas a, std::uint64_t b) { return a / b + (a % b != 0 ? 1 : 0); }

Gas solveFixed(OpKind k, Gas anchor, ByteView calldata, const CostParams& cp) {
    Gas variable = cp.baseTxCost + calldataGas(calldata, cp) + Gas{info(k).storageWrites} * cp.perStorageWrite;
    if (variable > anchor)
        fail(Errc::InvalidParams, std::string(info(k).name) + ": byte and storage pricing alone exceed the anchor");
    return anchor - variable;
}

}  // namespace

std::string_view opKindName(OpKind k) { return info(k).name; }

std::optional<OpKind> opKindFromName(std::string_view name) {
    for (const auto& o : kOps)
        if (o.name == name) return o.kind;
    return std::nullopt;
}

std::uint32_t defaultStorageWrites(OpKind k) { return info(k).storageWrites; }

Gas calldataGas(ByteView calldata, const CostParams& cp) {
    Gas zeros = 0;
    for (auto b : calldata) zeros += (b == 0);
    return zeros * cp.perZeroByte + (calldata.size() - zeros) * cp.perNonzeroByte;
}

Gas txCost(OpKind k, ByteView calldata, std::uint32_t storageWrites, const CostParams& cp) {
    auto it = cp.perOpFixed.find(k);
    if (it == cp.perOpFixed.end()) fail(Errc::InvalidArgument, "no fixed cost for op " + std::string(opKindName(k)));
    return cp.baseTxCost + it->second + calldataGas(calldata, cp) + Gas{storageWrites} * cp.perStorageWrite;
}

Bytes referenceRegisterPaymentCalldata(std::uint32_t payeeCount) {
    std::vector<AccountId> payees(payeeCount);
    std::iota(payees.begin(), payees.end(), AccountId{0});
    return encodeRecord(record::Payment{1, 1, 1, 0, std::nullopt, encodePayData(payees)});
}

Bytes referenceCollectCalldata() {
    CollectRequest req{2, 1, 3, 1000, 1000, 0, std::nullopt};
    auto sig = Identity::fromLabel("reference/recipient").sign(collectAuthorizationMessage(Address{}, req));
    return encodeRecord(record::CollectOpen{req, 0, sig});
}

void calibrateAnchors(CostParams& cp) {
    cp.perOpFixed[OpKind::RegisterPayment] = solveFixed(
        OpKind::RegisterPayment, kRegisterPaymentAnchorGas, referenceRegisterPaymentCalldata(kAnchorPayeeCount), cp);
    cp.perOpFixed[OpKind::Collect] = solveFixed(OpKind::Collect, kCollectAnchorGas, referenceCollectCalldata(), cp);
}

CostParams defaultCostParams() {
    CostParams cp;
    for (const auto& o : kOps) cp.perOpFixed[o.kind] = o.fixed;
    calibrateAnchors(cp);
    return cp;
}

Gas registerPaymentGas(std::uint32_t payeeCount, const CostParams& cp) {
    return txCost(OpKind::RegisterPayment, referenceRegisterPaymentCalldata(payeeCount),
                  defaultStorageWrites(OpKind::RegisterPayment), cp);
}

Gas collectGas(const CostParams& cp) {
    return txCost(OpKind::Collect, referenceCollectCalldata(), defaultStorageWrites(OpKind::Collect), cp);
}

Gas amortizedPerPayment(Gas registerGas, Gas collectGas, std::uint64_t n) {
    if (n == 0) fail(Errc::InvalidArgument, "amortization needs at least one payment");
    return ceilDiv(registerGas, n) + ceilDiv(collectGas, n);
}

double usdCost(Gas gas, double gasPriceGwei, double ethUsd) {
    if (gas == 0 || !(gasPriceGwei > 0) || !(ethUsd > 0))
        throw std::invalid_argument("usdCost needs positive gas, gas price and ETH price");
    return static_cast<double>(gas) * gasPriceGwei * 1e-9 * ethUsd;
}

std::string formatUsd(double usd) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5f", usd);
    return buf;
}

std::optional<OpKind> opKindOf(const Record& r) {
    switch (recordType(r)) {
        case RecordType::Instantiate:
        case RecordType::Mint:
        case RecordType::AdvanceBlock: return std::nullopt;
        case RecordType::Register: return OpKind::Register;
        case RecordType::Deposit: return OpKind::Deposit;
        case RecordType::Withdraw: return OpKind::Withdraw;
        case RecordType::BulkRegister: return OpKind::BulkRegister;
        case RecordType::ClaimBulkId: return OpKind::ClaimBulkId;
        case RecordType::Payment: return OpKind::RegisterPayment;
        case RecordType::Unlock: return OpKind::Unlock;
        case RecordType::Refund: return OpKind::Refund;
        case RecordType::CollectOpen: return OpKind::Collect;
        case RecordType::Challenge: return OpKind::Challenge;
        case RecordType::Response: return OpKind::RespondList;
        case RecordType::Selection: return OpKind::SelectPayment;
        case RecordType::Proof: return OpKind::ProvePayment;
        case RecordType::FreeSlot: return OpKind::FreeSlot;
        case RecordType::ChallengeSuccess: return OpKind::ChallengeSuccess;
        case RecordType::ChallengeFailed: return OpKind::ChallengeFailed;
    }
    return std::nullopt;
}

std::optional<TxCost> recordCost(const Record& r, const CostParams& cp) {
    auto kind = opKindOf(r);
    if (!kind) return std::nullopt;
    auto calldata = encodeRecord(r);
    return TxCost{*kind, calldata.size(), txCost(*kind, calldata, defaultStorageWrites(*kind), cp)};
}

void CostReport::add(const TxCost& tx, std::uint64_t payeesInTx) {
    transactions.push_back(tx);
    totalGas += tx.gas;
    if (tx.kind == OpKind::RegisterPayment || tx.kind == OpKind::Collect) relevantGas += tx.gas;
    paymentsCount += payeesInTx;
}

void CostReport::finalize(double gasPriceGwei, double ethUsd) {
    amortizedPerPayment = paymentsCount == 0 ? 0 : ceilDiv(relevantGas, paymentsCount);
    usdPerPayment = amortizedPerPayment == 0 ? 0.0 : usdCost(amortizedPerPayment, gasPriceGwei, ethUsd);
}

}  // namespace batpay
