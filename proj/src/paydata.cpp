#include "batpay/paydata.hpp"

#include <algorithm>

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"

namespace batpay {

Bytes encodePayData(std::span<const AccountId> payees) {
    if (payees.size() > std::numeric_limits<std::uint32_t>::max())
        fail(Errc::InvalidArgument, "payee list too long");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payees.size()));
    if (payees.empty()) return std::move(w).take();
    w.u32(payees.front());
    for (std::size_t i = 1; i < payees.size(); ++i) {
        if (payees[i] < payees[i - 1])
            fail(Errc::InvalidArgument, "payee IDs must be non-decreasing (position " + std::to_string(i) + ")");
        w.varint(payees[i] - payees[i - 1]);
    }
    return std::move(w).take();
}

std::vector<AccountId> decodePayData(ByteView wire, std::uint64_t idBound) {
    ByteReader r(wire);
    auto count = r.u32();
    std::vector<AccountId> out;
    if (count == 0) {
        r.expectEnd();
        return out;
    }
    // Every ID after the first needs at least one byte.
    if (count - 1 > r.remaining()) fail(Errc::BadEncoding, "payee count exceeds available bytes");
    out.reserve(count);
    std::uint64_t current = r.u32();
    if (current >= idBound) fail(Errc::BadEncoding, "first ID " + std::to_string(current) + " out of bounds");
    out.push_back(static_cast<AccountId>(current));
    for (std::uint32_t i = 1; i < count; ++i) {
        auto delta = r.varint();
        if (delta >= idBound - current) fail(Errc::BadEncoding, "delta overflows the ID bound");
        current += delta;
        out.push_back(static_cast<AccountId>(current));
    }
    r.expectEnd();
    return out;
}

std::size_t countOccurrences(std::span<const AccountId> payees, AccountId id) {
    auto [lo, hi] = std::equal_range(payees.begin(), payees.end(), id);
    return static_cast<std::size_t>(hi - lo);
}

}  // namespace batpay
