#pragma once

#include <cstdint>

#include "batpay/bytes.hpp"
#include "batpay/types.hpp"

namespace batpay {

// Slot IDs strictly above this value open an instant collect.
inline constexpr SlotId kInstantSlotThreshold = 32768;

struct Params {
    std::uint32_t maxAccountCount = 1u << 24;
    BlockNumber unlockPeriod = 10;
    BlockNumber challengePeriod = 8;   // State 1 window
    BlockNumber responsePeriod = 4;    // States 2-4 windows
    Amount collectStake = 100;
    Amount challengeStake = 100;
    SlotId instantSlotThreshold = kInstantSlotThreshold;
    std::uint32_t maxPaymentsPerBatch = 20000;

    // Throws ProtocolError(Errc::InvalidParams) naming the offending field.
    void validate() const;

    void encode(ByteWriter& out) const;
    static Params decode(ByteReader& in);

    bool operator==(const Params&) const = default;
};

}  // namespace batpay
