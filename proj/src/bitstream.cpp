#include "rankzip/bitstream.hpp"

#include "rankzip/error.hpp"

namespace rankzip {

Bitstream Bitstream::whole_bytes(std::vector<std::uint8_t> bytes, Backend backend) {
    Bitstream bs;
    bs.bit_length = 8 * static_cast<std::uint64_t>(bytes.size());
    bs.bytes = std::move(bytes);
    bs.backend = backend;
    return bs;
}

void BitWriter::put(bool bit) {
    if ((bits_ & 7) == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
    ++bits_;
}

void BitWriter::put_bits(std::uint32_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) put((value >> i) & 1u);
}

Bitstream BitWriter::finish(Backend backend) && {
    Bitstream bs;
    bs.bytes = std::move(bytes_);
    bs.bit_length = bits_;
    bs.backend = backend;
    return bs;
}

bool BitReader::get() {
    if (pos_ >= limit_) fail(ErrorCode::CorruptStream, "bitstream ended early");
    const bool bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return bit;
}

std::uint32_t BitReader::get_bits(unsigned width) {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint32_t>(get());
    return v;
}

namespace leb128 {

void append(std::vector<std::uint8_t>& out, std::uint32_t value) {
    while (value >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(value | 0x80));
        value >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(value));
}

std::vector<std::uint8_t> encode(std::span<const std::uint32_t> values) {
    std::vector<std::uint8_t> out;
    out.reserve(values.size());
    for (std::uint32_t v : values) append(out, v);
    return out;
}

std::vector<std::uint32_t> decode(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint32_t> values;
    std::size_t i = 0;
    while (i < bytes.size()) {
        std::uint64_t v = 0;
        unsigned shift = 0;
        for (;;) {
            if (i >= bytes.size()) fail(ErrorCode::CorruptStream, "truncated LEB128 value");
            if (shift > 28) fail(ErrorCode::CorruptStream, "LEB128 value exceeds 32 bits");
            const std::uint8_t b = bytes[i++];
            v |= std::uint64_t{b & 0x7fu} << shift;
            shift += 7;
            if ((b & 0x80) == 0) break;
        }
        if (v > 0xffffffffull) fail(ErrorCode::CorruptStream, "LEB128 value exceeds 32 bits");
        values.push_back(static_cast<std::uint32_t>(v));
    }
    return values;
}

}  // namespace leb128

}  // namespace rankzip
