#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace batpay {

using AccountId = std::uint32_t;
using PayIndex = std::uint64_t;
using BlockNumber = std::uint64_t;
using Amount = std::uint64_t;
using SlotId = std::uint16_t;
using Gas = std::uint64_t;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Deposit target that allocates a fresh account. It is the all-ones 32-bit
// pattern, i.e. the -1 the original contract accepts, and is never a valid ID
// because maxAccountCount is capped below it.
inline constexpr AccountId kNewAccount = std::numeric_limits<AccountId>::max();

std::string toHex(ByteView data);
// Accepts an optional 0x prefix. Throws std::invalid_argument on bad input.
Bytes fromHex(std::string_view text);

template <std::size_t N, class Tag>
struct FixedBytes {
    std::array<std::uint8_t, N> bytes{};

    static constexpr std::size_t size() { return N; }

    auto operator<=>(const FixedBytes&) const = default;

    [[nodiscard]] ByteView view() const { return bytes; }
    [[nodiscard]] bool isZero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }
    [[nodiscard]] std::string hex() const { return toHex(bytes); }

    static FixedBytes fromView(ByteView data);
    static FixedBytes fromHexString(std::string_view text) { return fromView(fromHex(text)); }
};

struct DigestTag {};
struct AddressTag {};
struct SignatureTag {};

using Digest = FixedBytes<32, DigestTag>;
using Address = FixedBytes<20, AddressTag>;
using Signature = FixedBytes<32, SignatureTag>;

}  // namespace batpay

#include <stdexcept>

template <std::size_t N, class Tag>
batpay::FixedBytes<N, Tag> batpay::FixedBytes<N, Tag>::fromView(ByteView data) {
    if (data.size() != N)
        throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                    std::to_string(data.size()));
    FixedBytes out;
    for (std::size_t i = 0; i < N; ++i) out.bytes[i] = data[i];
    return out;
}
