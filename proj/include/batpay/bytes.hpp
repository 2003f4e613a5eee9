#pragma once

#include <cstdint>

#include "batpay/error.hpp"
#include "batpay/types.hpp"

namespace batpay {

// Little-endian writer used by every wire format in the project.
class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void raw(ByteView data) { out_.insert(out_.end(), data.begin(), data.end()); }
    // Length-prefixed (u32) byte string.
    void blob(ByteView data) {
        u32(static_cast<std::uint32_t>(data.size()));
        raw(data);
    }
    void varint(std::uint64_t v);

    template <std::size_t N, class Tag>
    void fixed(const FixedBytes<N, Tag>& v) {
        raw(v.bytes);
    }

    [[nodiscard]] const Bytes& bytes() const& { return out_; }
    [[nodiscard]] Bytes take() && { return std::move(out_); }
    [[nodiscard]] std::size_t size() const { return out_.size(); }

private:
    void put(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    Bytes out_;
};

// Bounds-checked reader. Truncation and malformed varints throw
// ProtocolError(Errc::BadEncoding).
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    ByteView raw(std::size_t n);
    Bytes blob() {
        auto n = u32();
        auto v = raw(n);
        return Bytes(v.begin(), v.end());
    }
    // Canonical unsigned LEB128: rejects redundant trailing zero groups and
    // values wider than 64 bits.
    std::uint64_t varint();

    template <class T>
    T fixed() {
        return T::fromView(raw(T::size()));
    }

    [[nodiscard]] bool atEnd() const { return pos_ == in_.size(); }
    [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }
    [[nodiscard]] std::size_t position() const { return pos_; }
    void expectEnd() const {
        if (!atEnd()) fail(Errc::BadEncoding, std::to_string(remaining()) + " trailing bytes");
    }

private:
    std::uint64_t get(int width);

    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace batpay
