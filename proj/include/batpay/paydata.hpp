#pragma once

#include <cstdint>
#include <vector>

#include "batpay/types.hpp"

namespace batpay {

/// Payee-list codec.
///
/// Wire form: payee count (u32 LE); then, if the count is non-zero, the first
/// ID (u32 LE) followed by one unsigned LEB128 delta per subsequent ID. A
/// delta of zero repeats the previous ID, which is how a payee receives an
/// integer multiple of the per-destination amount.
///
/// Gaps below 128 cost one byte, so a list of n such IDs encodes to
/// 8 + (n - 1) bytes.
Bytes encodePayData(std::span<const AccountId> payees);

/// Inverse of encodePayData. Rejects truncation, trailing bytes, non-canonical
/// varints and any ID at or above `idBound`.
std::vector<AccountId> decodePayData(ByteView wire, std::uint64_t idBound = std::uint64_t{1} << 32);

std::size_t countOccurrences(std::span<const AccountId> payees, AccountId id);

}  // namespace batpay
