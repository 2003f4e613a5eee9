#include "batpay/error.hpp"

namespace batpay {

std::string_view errcName(Errc code) {
    switch (code) {
        case Errc::InvalidParams: return "invalid-params";
        case Errc::InvalidArgument: return "invalid-argument";
        case Errc::Overflow: return "overflow";
        case Errc::UnknownAccount: return "unknown-account";
        case Errc::UnclaimedAccount: return "unclaimed-account";
        case Errc::Unauthorized: return "unauthorized";
        case Errc::InsufficientFunds: return "insufficient-funds";
        case Errc::AccountTableFull: return "account-table-full";
        case Errc::BadEncoding: return "bad-encoding";
        case Errc::UnknownBulk: return "unknown-bulk";
        case Errc::OutOfRange: return "out-of-range";
        case Errc::AlreadyClaimed: return "already-claimed";
        case Errc::BadProof: return "bad-proof";
        case Errc::EmptyPayees: return "empty-payees";
        case Errc::BatchTooLarge: return "batch-too-large";
        case Errc::UnknownPayment: return "unknown-payment";
        case Errc::NotLocked: return "not-locked";
        case Errc::WindowExpired: return "window-expired";
        case Errc::WindowOpen: return "window-open";
        case Errc::BadKey: return "bad-key";
        case Errc::SlotOccupied: return "slot-occupied";
        case Errc::UnknownSlot: return "unknown-slot";
        case Errc::WrongState: return "wrong-state";
        case Errc::DeadlinePassed: return "deadline-passed";
        case Errc::DeadlineNotReached: return "deadline-not-reached";
        case Errc::BadSignature: return "bad-signature";
        case Errc::StaleRange: return "stale-range";
        case Errc::OverlappingRange: return "overlapping-range";
        case Errc::NotCollectable: return "not-collectable";
        case Errc::SumMismatch: return "sum-mismatch";
        case Errc::NotInList: return "not-in-list";
        case Errc::DigestMismatch: return "digest-mismatch";
        case Errc::RecipientAbsent: return "recipient-absent";
        case Errc::AmountMismatch: return "amount-mismatch";
        case Errc::NotCommitted: return "not-committed";
        case Errc::SelfChallenge: return "self-challenge";
        case Errc::InsufficientEscrow: return "insufficient-escrow";
        case Errc::InvariantViolation: return "invariant-violation";
    }
    return "unknown";
}

}  // namespace batpay
