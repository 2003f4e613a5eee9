#include "batpay/bytes.hpp"

namespace batpay {

void ByteWriter::varint(std::uint64_t v) {
    do {
        std::uint8_t b = v & 0x7f;
        v >>= 7;
        if (v != 0) b |= 0x80;
        out_.push_back(b);
    } while (v != 0);
}

ByteView ByteReader::raw(std::size_t n) {
    if (n > remaining())
        fail(Errc::BadEncoding, "truncated: need " + std::to_string(n) + " bytes, have " +
                                    std::to_string(remaining()));
    auto v = in_.subspan(pos_, n);
    pos_ += n;
    return v;
}

std::uint64_t ByteReader::get(int width) {
    auto v = raw(static_cast<std::size_t>(width));
    std::uint64_t out = 0;
    for (int i = 0; i < width; ++i) out |= std::uint64_t{v[i]} << (8 * i);
    return out;
}

std::uint64_t ByteReader::varint() {
    std::uint64_t value = 0;
    for (int i = 0;; ++i) {
        if (atEnd()) fail(Errc::BadEncoding, "truncated varint");
        std::uint8_t b = in_[pos_++];
        std::uint64_t group = b & 0x7f;
        if (i == 9 && group > 1) fail(Errc::BadEncoding, "varint exceeds 64 bits");
        value |= group << (7 * i);
        if ((b & 0x80) == 0) {
            if (i > 0 && group == 0) fail(Errc::BadEncoding, "non-canonical varint");
            return value;
        }
        if (i == 9) fail(Errc::BadEncoding, "varint exceeds 64 bits");
    }
}

}  // namespace batpay
