#include "rankzip/codec.hpp"

#include <array>
#include <utility>

#include "rankzip/entropy.hpp"
#include "rankzip/error.hpp"
#include "rankzip/rank_transform.hpp"

namespace rankzip {

namespace {

constexpr std::array<std::pair<Pipeline, std::string_view>, kPipelineCount> kNames = {{
    {Pipeline::Deflate, "deflate"},
    {Pipeline::Huffman, "huffman"},
    {Pipeline::Arithmetic, "arithmetic"},
    {Pipeline::RankDeflate, "rank+deflate"},
    {Pipeline::RankHuffman, "rank+huffman"},
}};

Predictor& need(Predictor* p, Pipeline pipeline) {
    if (p == nullptr) {
        fail(ErrorCode::InvalidArgument, "pipeline " + std::string(pipeline_name(pipeline)) + " needs a predictor");
    }
    return *p;
}

}  // namespace

std::string_view pipeline_name(Pipeline p) noexcept {
    for (const auto& [value, name] : kNames) {
        if (value == p) return name;
    }
    return "unknown";
}

std::optional<Pipeline> parse_pipeline(std::string_view name) noexcept {
    for (const auto& [value, n] : kNames) {
        if (n == name) return value;
    }
    return std::nullopt;
}

EncodedText encode_tokens(Pipeline pipeline, Predictor* predictor, const TokenSequence& tokens) {
    EncodedText out;
    switch (pipeline) {
        case Pipeline::Deflate:
            out.bitstream = deflate_encode(tokens.values(), &out.stats);
            break;
        case Pipeline::Huffman:
            out.bitstream = adaptive_huffman_encode(tokens.values(), tokens.vocab().size(), &out.stats);
            break;
        case Pipeline::Arithmetic:
            out.bitstream = arithmetic_encode(need(predictor, pipeline), tokens, &out.stats);
            break;
        case Pipeline::RankDeflate:
            out.bitstream = deflate_encode(tokens_to_ranks(need(predictor, pipeline), tokens), &out.stats);
            break;
        case Pipeline::RankHuffman:
            out.bitstream = adaptive_huffman_encode(tokens_to_ranks(need(predictor, pipeline), tokens), &out.stats);
            break;
    }
    return out;
}

TokenSequence decode_tokens(Pipeline pipeline, Predictor* predictor, const Bitstream& bs, const Vocabulary& vocab,
                            std::size_t count) {
    switch (pipeline) {
        case Pipeline::Deflate:
            return TokenSequence(vocab, deflate_decode(bs, vocab.size(), count));
        case Pipeline::Huffman:
            return TokenSequence(vocab, adaptive_huffman_decode(bs, vocab.size(), count));
        case Pipeline::Arithmetic:
            return arithmetic_decode(need(predictor, pipeline), bs, vocab, count);
        case Pipeline::RankDeflate:
            return ranks_to_tokens(need(predictor, pipeline), deflate_decode(bs, vocab, count));
        case Pipeline::RankHuffman:
            return ranks_to_tokens(need(predictor, pipeline), adaptive_huffman_decode(bs, vocab, count));
    }
    fail(ErrorCode::InvalidArgument, "unknown pipeline");
}

ContainerFile compress(Pipeline pipeline, Predictor* predictor, const TokenSequence& tokens, CodingStats* stats) {
    if (uses_predictor(pipeline)) require_same_vocab(need(predictor, pipeline).vocabulary(), tokens.vocab());
    EncodedText encoded = encode_tokens(pipeline, predictor, tokens);
    if (stats) *stats = encoded.stats;

    ContainerHeader h;
    h.pipeline = pipeline;
    h.predictor_id = uses_predictor(pipeline) ? predictor->id() : std::string(kNoPredictorId);
    h.vocab_identifier = tokens.vocab().identifier();
    h.vocab_size = tokens.vocab().size();
    h.token_count = tokens.size();
    h.token_crc32 = token_crc32(tokens.values());
    return make_container(std::move(h), std::move(encoded.bitstream), {});
}

TokenSequence decompress(const ContainerFile& file, Predictor* predictor) {
    const ContainerHeader& h = file.header;
    file.verify_payload_crc();
    const Vocabulary vocab(h.vocab_size, h.vocab_identifier);
    if (uses_predictor(h.pipeline)) {
        Predictor& p = need(predictor, h.pipeline);
        if (p.id() != h.predictor_id) {
            fail(ErrorCode::VocabMismatch, "stream was coded with predictor '" + h.predictor_id + "', got '" + p.id() + "'");
        }
        require_same_vocab(vocab, p.vocabulary());
    }
    TokenSequence tokens = decode_tokens(h.pipeline, predictor, file.text, vocab, static_cast<std::size_t>(h.token_count));
    if (token_crc32(tokens.values()) != h.token_crc32) fail(ErrorCode::CorruptStream, "decoded tokens fail their checksum");
    return tokens;
}

}  // namespace rankzip
