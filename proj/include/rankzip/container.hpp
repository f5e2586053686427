#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankzip/bitstream.hpp"

namespace rankzip {

/// How the text payload was produced.
enum class Pipeline : std::uint8_t {
    Deflate = 0,      // LEB128 tokens, DEFLATE
    Huffman = 1,      // tokens, adaptive Huffman
    Arithmetic = 2,   // tokens, range coder against the predictor
    RankDeflate = 3,  // rank transform, LEB128, DEFLATE
    RankHuffman = 4,  // rank transform, adaptive Huffman
};

inline constexpr std::uint8_t kPipelineCount = 5;

Backend backend_of(Pipeline p) noexcept;
bool uses_rank_transform(Pipeline p) noexcept;
bool uses_predictor(Pipeline p) noexcept;

/// File layout (all integers little-endian, strings are u16 length + UTF-8):
///
///   magic               4   "RKZC"
///   format_version      u16 (1)
///   pipeline            u8
///   flags               u8  bit 0: dimensions present
///   text_pad_bits       u8  0..7 padding bits in the last text byte
///   predictor_id        str
///   vocab_identifier    str (non-empty)
///   vocab_size          u32 (>= 2)
///   token_count         u64
///   text_payload_bytes  u64
///   image_payload_bytes u64
///   [width, height]     u32, u32 when flags bit 0 is set
///   payload_crc32       u32 CRC-32 of text payload then image payload
///   token_crc32         u32 CRC-32 of the LEB128-serialized tokens
///   text payload, image payload
struct ContainerHeader {
    static constexpr std::array<std::uint8_t, 4> kMagic = {'R', 'K', 'Z', 'C'};
    static constexpr std::uint16_t kFormatVersion = 1;

    std::uint16_t format_version = kFormatVersion;
    Pipeline pipeline = Pipeline::RankDeflate;
    std::uint8_t text_pad_bits = 0;
    std::string predictor_id;
    std::string vocab_identifier;
    std::uint32_t vocab_size = 0;
    std::uint64_t token_count = 0;
    std::uint64_t text_payload_bytes = 0;
    std::uint64_t image_payload_bytes = 0;
    std::optional<std::uint32_t> width;
    std::optional<std::uint32_t> height;
    std::uint32_t payload_crc32 = 0;
    std::uint32_t token_crc32 = 0;

    std::size_t serialized_size() const;
    bool operator==(const ContainerHeader&) const = default;
};

struct ContainerFile {
    ContainerHeader header;
    Bitstream text;
    std::vector<std::uint8_t> image;

    std::uint64_t file_size() const;
    /// 8 * file size / (width * height), when dimensions are present.
    std::optional<double> bits_per_pixel() const;
    /// Throws CorruptStream if payload_crc32 disagrees with the payloads.
    void verify_payload_crc() const;

    bool operator==(const ContainerFile&) const = default;
};

/// Fills in payload sizes, padding and payload CRC from the payloads.
ContainerFile make_container(ContainerHeader header, Bitstream text, std::vector<std::uint8_t> image);

/// Serializes a container. Throws InvalidHeader if the declared sizes,
/// padding or backend do not match the payloads.
std::vector<std::uint8_t> mux(const ContainerFile& file);

/// Parses arbitrary bytes. Throws NotAContainer, Truncated,
/// UnsupportedVersion or InvalidHeader; never reads past the input.
ContainerFile demux(std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed = 0);
std::uint32_t token_crc32(std::span<const std::uint32_t> tokens);

}  // namespace rankzip
