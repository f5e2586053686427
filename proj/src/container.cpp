#include "rankzip/container.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "rankzip/error.hpp"

namespace rankzip {

Backend backend_of(Pipeline p) noexcept {
    switch (p) {
        case Pipeline::Deflate:
        case Pipeline::RankDeflate: return Backend::Deflate;
        case Pipeline::Huffman:
        case Pipeline::RankHuffman: return Backend::AdaptiveHuffman;
        case Pipeline::Arithmetic: return Backend::Arithmetic;
    }
    return Backend::Deflate;
}

bool uses_rank_transform(Pipeline p) noexcept {
    return p == Pipeline::RankDeflate || p == Pipeline::RankHuffman;
}

bool uses_predictor(Pipeline p) noexcept { return uses_rank_transform(p) || p == Pipeline::Arithmetic; }

std::uint32_t crc32(std::span<const std::uint8_t> bytes, std::uint32_t seed) {
    uLong crc = seed;
    // zlib takes uInt lengths; feed large buffers in pieces.
    while (!bytes.empty()) {
        const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
        crc = ::crc32(crc, bytes.data(), n);
        bytes = bytes.subspan(n);
    }
    return static_cast<std::uint32_t>(crc);
}

std::uint32_t token_crc32(std::span<const std::uint32_t> tokens) {
    return crc32(leb128::encode(tokens));
}

namespace {

constexpr std::uint8_t kFlagDimensions = 0x01;
constexpr std::size_t kMaxString = 0xffff;

class Writer {
public:
    void u8(std::uint8_t v) { out.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void str(const std::string& s) {
        u16(static_cast<std::uint16_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }

    std::vector<std::uint8_t> out;

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::string str() {
        const std::size_t n = u16();
        need(n);
        std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail(ErrorCode::Truncated, "container ends inside its header");
    }
    std::uint64_t le(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void check_fields(const ContainerHeader& h) {
    if (static_cast<std::uint8_t>(h.pipeline) >= kPipelineCount) fail(ErrorCode::InvalidHeader, "unknown pipeline id");
    if (h.text_pad_bits > 7) fail(ErrorCode::InvalidHeader, "text padding exceeds 7 bits");
    if (h.text_pad_bits != 0 && h.text_payload_bytes == 0) fail(ErrorCode::InvalidHeader, "padding declared for an empty text payload");
    if (h.vocab_size < 2) fail(ErrorCode::InvalidHeader, "vocabulary size must be >= 2");
    if (h.vocab_identifier.empty()) fail(ErrorCode::InvalidHeader, "empty vocabulary identifier");
    if (h.predictor_id.size() > kMaxString || h.vocab_identifier.size() > kMaxString) {
        fail(ErrorCode::InvalidHeader, "header string too long");
    }
    if (h.width.has_value() != h.height.has_value()) fail(ErrorCode::InvalidHeader, "width and height must appear together");
    if (h.width && (*h.width == 0 || *h.height == 0)) fail(ErrorCode::InvalidHeader, "zero image dimension");
}

}  // namespace

std::size_t ContainerHeader::serialized_size() const {
    return 4 + 2 + 1 + 1 + 1 + (2 + predictor_id.size()) + (2 + vocab_identifier.size()) + 4 + 8 + 8 + 8 +
           (width ? 8 : 0) + 4 + 4;
}

std::uint64_t ContainerFile::file_size() const {
    return header.serialized_size() + header.text_payload_bytes + header.image_payload_bytes;
}

std::optional<double> ContainerFile::bits_per_pixel() const {
    if (!header.width || !header.height) return std::nullopt;
    const double pixels = static_cast<double>(*header.width) * static_cast<double>(*header.height);
    return 8.0 * static_cast<double>(file_size()) / pixels;
}

void ContainerFile::verify_payload_crc() const {
    if (crc32(image, crc32(text.bytes)) != header.payload_crc32) {
        fail(ErrorCode::CorruptStream, "payload checksum mismatch");
    }
}

ContainerFile make_container(ContainerHeader header, Bitstream text, std::vector<std::uint8_t> image) {
    header.text_payload_bytes = text.bytes.size();
    header.image_payload_bytes = image.size();
    header.text_pad_bits = static_cast<std::uint8_t>(8 * text.bytes.size() - text.bit_length);
    header.payload_crc32 = crc32(image, crc32(text.bytes));
    return ContainerFile{std::move(header), std::move(text), std::move(image)};
}

std::vector<std::uint8_t> mux(const ContainerFile& file) {
    const ContainerHeader& h = file.header;
    check_fields(h);
    if (h.format_version != ContainerHeader::kFormatVersion) fail(ErrorCode::InvalidHeader, "unsupported format version");
    if (h.text_payload_bytes != file.text.bytes.size() || h.image_payload_bytes != file.image.size()) {
        fail(ErrorCode::InvalidHeader, "declared payload sizes do not match the payloads");
    }
    if (file.text.bit_length + h.text_pad_bits != 8 * static_cast<std::uint64_t>(file.text.bytes.size())) {
        fail(ErrorCode::InvalidHeader, "declared padding does not match the text bit length");
    }
    if (file.text.backend != backend_of(h.pipeline)) fail(ErrorCode::InvalidHeader, "text backend does not match the pipeline");

    Writer w;
    w.bytes(ContainerHeader::kMagic);
    w.u16(h.format_version);
    w.u8(static_cast<std::uint8_t>(h.pipeline));
    w.u8(h.width ? kFlagDimensions : 0);
    w.u8(h.text_pad_bits);
    w.str(h.predictor_id);
    w.str(h.vocab_identifier);
    w.u32(h.vocab_size);
    w.u64(h.token_count);
    w.u64(h.text_payload_bytes);
    w.u64(h.image_payload_bytes);
    if (h.width) {
        w.u32(*h.width);
        w.u32(*h.height);
    }
    w.u32(h.payload_crc32);
    w.u32(h.token_crc32);
    w.bytes(file.text.bytes);
    w.bytes(file.image);
    return std::move(w.out);
}

ContainerFile demux(std::span<const std::uint8_t> bytes) {
    const auto& magic = ContainerHeader::kMagic;
    const std::size_t probe = std::min(bytes.size(), magic.size());
    if (!std::equal(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(probe), magic.begin())) {
        fail(ErrorCode::NotAContainer, "bad magic");
    }
    if (bytes.size() < magic.size()) fail(ErrorCode::Truncated, "container ends inside its magic");

    Reader r(bytes.subspan(magic.size()));
    ContainerFile file;
    ContainerHeader& h = file.header;
    h.format_version = r.u16();
    if (h.format_version != ContainerHeader::kFormatVersion) {
        fail(ErrorCode::UnsupportedVersion, "format version " + std::to_string(h.format_version));
    }
    const std::uint8_t pipeline = r.u8();
    if (pipeline >= kPipelineCount) fail(ErrorCode::InvalidHeader, "unknown pipeline id " + std::to_string(pipeline));
    h.pipeline = static_cast<Pipeline>(pipeline);
    const std::uint8_t flags = r.u8();
    if (flags & ~kFlagDimensions) fail(ErrorCode::InvalidHeader, "unknown header flags");
    h.text_pad_bits = r.u8();
    h.predictor_id = r.str();
    h.vocab_identifier = r.str();
    h.vocab_size = r.u32();
    h.token_count = r.u64();
    h.text_payload_bytes = r.u64();
    h.image_payload_bytes = r.u64();
    if (flags & kFlagDimensions) {
        h.width = r.u32();
        h.height = r.u32();
    }
    h.payload_crc32 = r.u32();
    h.token_crc32 = r.u32();
    check_fields(h);

    const std::uint64_t avail = r.remaining();
    if (h.text_payload_bytes > avail || h.image_payload_bytes > avail - h.text_payload_bytes) {
        fail(ErrorCode::Truncated, "payloads extend past the end of the file");
    }
    if (h.text_payload_bytes + h.image_payload_bytes != avail) {
        fail(ErrorCode::InvalidHeader, "trailing bytes after the declared payloads");
    }
    const auto text = r.take(static_cast<std::size_t>(h.text_payload_bytes));
    const auto image = r.take(static_cast<std::size_t>(h.image_payload_bytes));
    file.text.bytes.assign(text.begin(), text.end());
    file.text.bit_length = 8 * h.text_payload_bytes - h.text_pad_bits;
    file.text.backend = backend_of(h.pipeline);
    file.image.assign(image.begin(), image.end());
    return file;
}

}  // namespace rankzip
