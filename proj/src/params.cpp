#include "batpay/params.hpp"

#include "batpay/error.hpp"

namespace batpay {

void Params::validate() const {
    auto reject = [](const char* field, const char* why) {
        fail(Errc::InvalidParams, std::string(field) + " " + why);
    };
    if (maxAccountCount == 0) reject("maxAccountCount", "must be positive");
    if (maxAccountCount >= kNewAccount) reject("maxAccountCount", "must leave the new-account sentinel free");
    if (unlockPeriod < 1) reject("unlockPeriod", "must be at least 1 block");
    if (challengePeriod < 1) reject("challengePeriod", "must be at least 1 block");
    if (responsePeriod < 1) reject("responsePeriod", "must be at least 1 block");
    if (collectStake == 0) reject("collectStake", "must be positive");
    if (challengeStake == 0) reject("challengeStake", "must be positive");
    if (instantSlotThreshold != kInstantSlotThreshold) reject("instantSlotThreshold", "is fixed at 32768");
    if (maxPaymentsPerBatch == 0) reject("maxPaymentsPerBatch", "must be positive");
}

void Params::encode(ByteWriter& out) const {
    out.u32(maxAccountCount);
    out.u64(unlockPeriod);
    out.u64(challengePeriod);
    out.u64(responsePeriod);
    out.u64(collectStake);
    out.u64(challengeStake);
    out.u16(instantSlotThreshold);
    out.u32(maxPaymentsPerBatch);
}

Params Params::decode(ByteReader& in) {
    Params p;
    p.maxAccountCount = in.u32();
    p.unlockPeriod = in.u64();
    p.challengePeriod = in.u64();
    p.responsePeriod = in.u64();
    p.collectStake = in.u64();
    p.challengeStake = in.u64();
    p.instantSlotThreshold = in.u16();
    p.maxPaymentsPerBatch = in.u32();
    return p;
}

}  // namespace batpay
