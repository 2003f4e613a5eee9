#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "batpay/types.hpp"

namespace batpay {

enum class Errc {
    InvalidParams,
    InvalidArgument,
    Overflow,
    UnknownAccount,
    UnclaimedAccount,
    Unauthorized,
    InsufficientFunds,
    AccountTableFull,
    BadEncoding,
    UnknownBulk,
    OutOfRange,
    AlreadyClaimed,
    BadProof,
    EmptyPayees,
    BatchTooLarge,
    UnknownPayment,
    NotLocked,
    WindowExpired,
    WindowOpen,
    BadKey,
    SlotOccupied,
    UnknownSlot,
    WrongState,
    DeadlinePassed,
    DeadlineNotReached,
    BadSignature,
    StaleRange,
    OverlappingRange,
    NotCollectable,
    SumMismatch,
    NotInList,
    DigestMismatch,
    RecipientAbsent,
    AmountMismatch,
    NotCommitted,
    SelfChallenge,
    InsufficientEscrow,
    InvariantViolation,
};

std::string_view errcName(Errc code);

/// Rejection of a protocol operation. Every operation that throws leaves the
/// protocol state exactly as it was before the call.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errcName(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw ProtocolError(code, what); }

inline Amount checkedAdd(Amount a, Amount b) {
    Amount r;
    if (__builtin_add_overflow(a, b, &r)) fail(Errc::Overflow, "addition overflows 64 bits");
    return r;
}

inline Amount checkedSub(Amount a, Amount b) {
    if (b > a) fail(Errc::Overflow, "subtraction underflows");
    return a - b;
}

inline Amount checkedMul(Amount a, Amount b) {
    Amount r;
    if (__builtin_mul_overflow(a, b, &r)) fail(Errc::Overflow, "multiplication overflows 64 bits");
    return r;
}

}  // namespace batpay
