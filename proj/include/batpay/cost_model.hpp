#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "batpay/chain_log.hpp"
#include "batpay/types.hpp"

namespace batpay {

enum class OpKind : std::uint8_t {
    Register,
    Deposit,
    Withdraw,
    BulkRegister,
    ClaimBulkId,
    RegisterPayment,
    Unlock,
    Refund,
    Collect,
    FreeSlot,
    Challenge,
    RespondList,
    SelectPayment,
    ProvePayment,
    ChallengeSuccess,
    ChallengeFailed,
};

inline constexpr OpKind kAllOpKinds[] = {
    OpKind::Register,       OpKind::Deposit,       OpKind::Withdraw,         OpKind::BulkRegister,
    OpKind::ClaimBulkId,    OpKind::RegisterPayment, OpKind::Unlock,         OpKind::Refund,
    OpKind::Collect,        OpKind::FreeSlot,      OpKind::Challenge,        OpKind::RespondList,
    OpKind::SelectPayment,  OpKind::ProvePayment,  OpKind::ChallengeSuccess, OpKind::ChallengeFailed,
};

std::string_view opKindName(OpKind k);
std::optional<OpKind> opKindFromName(std::string_view name);

/// Linear gas surrogate: base + per-op fixed + calldata bytes + storage writes.
/// This is a calibrated model, not EVM metering.
struct CostParams {
    Gas baseTxCost = 21000;
    Gas perZeroByte = 4;
    Gas perNonzeroByte = 16;
    Gas perStorageWrite = 5000;
    std::map<OpKind, Gas> perOpFixed;

    bool operator==(const CostParams&) const = default;
};

std::uint32_t defaultStorageWrites(OpKind k);

Gas calldataGas(ByteView calldata, const CostParams& cp);
// Throws ProtocolError(InvalidArgument) for an op kind missing from perOpFixed.
Gas txCost(OpKind k, ByteView calldata, std::uint32_t storageWrites, const CostParams& cp);

// Calldata of the calibration transactions: a registerPayment to payees
// 0..n-1 (every delta is 1) and a collect over 1000 payments.
Bytes referenceRegisterPaymentCalldata(std::uint32_t payeeCount);
Bytes referenceCollectCalldata();

inline constexpr Gas kRegisterPaymentAnchorGas = 228255;  // 1000 payees
inline constexpr Gas kCollectAnchorGas = 167440;
inline constexpr std::uint32_t kAnchorPayeeCount = 1000;

// Default calibration: public calldata pricing, with the registerPayment and
// collect fixed costs solved so both anchors are reproduced exactly.
CostParams defaultCostParams();
// Re-solves the two anchored fixed costs for arbitrary byte/storage pricing.
void calibrateAnchors(CostParams& cp);

Gas registerPaymentGas(std::uint32_t payeeCount, const CostParams& cp);
Gas collectGas(const CostParams& cp);

// ceil(registerGas / n) + ceil(collectGas / n). Throws on n == 0.
Gas amortizedPerPayment(Gas registerGas, Gas collectGas, std::uint64_t n);

// gas * gwei * 1e-9 * ethUsd. Throws std::invalid_argument unless all > 0.
double usdCost(Gas gas, double gasPriceGwei, double ethUsd);
// Fixed 5-decimal rendering, e.g. "0.00045".
std::string formatUsd(double usd);

// Op kind a chain-log record is charged as; nullopt for non-transaction
// records (instantiation, faucet mints, block advances).
std::optional<OpKind> opKindOf(const Record& r);

struct TxCost {
    OpKind kind{};
    std::uint64_t calldataBytes = 0;
    Gas gas = 0;
    bool operator==(const TxCost&) const = default;
};

std::optional<TxCost> recordCost(const Record& r, const CostParams& cp);

struct CostReport {
    std::vector<TxCost> transactions;
    Gas totalGas = 0;
    // registerPayment + collect gas: the two transactions a payment needs.
    Gas relevantGas = 0;
    std::uint64_t paymentsCount = 0;  // individual payee entries
    Gas amortizedPerPayment = 0;      // ceil(relevantGas / paymentsCount)
    double usdPerPayment = 0;

    void add(const TxCost& tx, std::uint64_t payeesInTx);
    void finalize(double gasPriceGwei, double ethUsd);
};

}  // namespace batpay
