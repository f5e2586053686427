#pragma once

#include <optional>
#include <string_view>

#include "rankzip/container.hpp"
#include "rankzip/predictor.hpp"

namespace rankzip {

/// CLI spelling: deflate, huffman, arithmetic, rank+deflate, rank+huffman.
std::string_view pipeline_name(Pipeline p) noexcept;
std::optional<Pipeline> parse_pipeline(std::string_view name) noexcept;

struct EncodedText {
    Bitstream bitstream;
    CodingStats stats;
};

/// Runs one pipeline over a token sequence. `predictor` may be null for
/// pipelines that do not use one.
EncodedText encode_tokens(Pipeline pipeline, Predictor* predictor, const TokenSequence& tokens);
TokenSequence decode_tokens(Pipeline pipeline, Predictor* predictor, const Bitstream& bs, const Vocabulary& vocab,
                            std::size_t count);

/// predictor_id recorded for pipelines that use no predictor.
inline constexpr std::string_view kNoPredictorId = "none";

/// Encodes and packs a text-only container.
ContainerFile compress(Pipeline pipeline, Predictor* predictor, const TokenSequence& tokens,
                       CodingStats* stats = nullptr);

/// Decodes a container's text stream. Checks the payload CRC (CorruptStream),
/// that `predictor` matches the recorded predictor and vocabulary
/// (VocabMismatch), and the CRC of the decoded tokens (CorruptStream).
TokenSequence decompress(const ContainerFile& file, Predictor* predictor);

}  // namespace rankzip
