#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rankzip {

enum class Backend : std::uint8_t { Deflate = 0, AdaptiveHuffman = 1, Arithmetic = 2 };

/// Coded bytes plus the count of meaningful bits; the final byte may carry
/// up to seven padding bits.
struct Bitstream {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bit_length = 0;
    Backend backend = Backend::Deflate;

    /// Byte-granular stream (bit_length = 8 * size).
    static Bitstream whole_bytes(std::vector<std::uint8_t> bytes, Backend backend);

    bool operator==(const Bitstream&) const = default;
};

struct CodingStats {
    std::uint64_t input_symbols = 0;
    std::uint64_t output_bits = 0;
    // Sum of -log2 q(symbol) under the model the coder actually used.
    std::optional<double> cross_entropy_bits;
};

/// MSB-first bit packer.
class BitWriter {
public:
    void put(bool bit);
    void put_bits(std::uint32_t value, unsigned width);  // high bit first
    std::uint64_t bit_length() const noexcept { return bits_; }
    Bitstream finish(Backend backend) &&;

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bits_ = 0;
};

/// Reads bits written by BitWriter; throws CorruptStream past bit_length.
class BitReader {
public:
    explicit BitReader(const Bitstream& bs) : bytes_(bs.bytes), limit_(bs.bit_length) {}

    bool get();
    std::uint32_t get_bits(unsigned width);
    std::uint64_t position() const noexcept { return pos_; }
    std::uint64_t remaining() const noexcept { return limit_ - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t limit_;
    std::uint64_t pos_ = 0;
};

/// Unsigned LEB128: 7 value bits per byte, low group first, high bit set on
/// every byte but the last.
namespace leb128 {

void append(std::vector<std::uint8_t>& out, std::uint32_t value);
std::vector<std::uint8_t> encode(std::span<const std::uint32_t> values);

/// Decodes the whole buffer. Throws CorruptStream on a truncated or
/// over-long group or a value that does not fit in 32 bits.
std::vector<std::uint32_t> decode(std::span<const std::uint8_t> bytes);

}  // namespace leb128

}  // namespace rankzip
