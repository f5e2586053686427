#include "rankzip/remote.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "json.hpp"
#include "rankzip/error.hpp"
#include "rankzip/kernels.hpp"

namespace rankzip {

using nlohmann::json;

namespace wire {

void write_frame(Transport& t, std::string_view payload) {
    if (payload.size() > kMaxFrameBytes) fail(ErrorCode::ProtocolError, "frame too large");
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::vector<std::uint8_t> buf(4 + payload.size());
    buf[0] = static_cast<std::uint8_t>(n >> 24);
    buf[1] = static_cast<std::uint8_t>(n >> 16);
    buf[2] = static_cast<std::uint8_t>(n >> 8);
    buf[3] = static_cast<std::uint8_t>(n);
    std::copy(payload.begin(), payload.end(), buf.begin() + 4);
    t.write_all(buf);
}

std::string read_frame(Transport& t) {
    std::uint8_t len[4];
    t.read_exact(len);
    const std::uint32_t n = (std::uint32_t{len[0]} << 24) | (std::uint32_t{len[1]} << 16) |
                            (std::uint32_t{len[2]} << 8) | std::uint32_t{len[3]};
    if (n > kMaxFrameBytes) fail(ErrorCode::ProtocolError, "frame length " + std::to_string(n) + " exceeds limit");
    std::string payload(n, '\0');
    t.read_exact(std::span(reinterpret_cast<std::uint8_t*>(payload.data()), payload.size()));
    return payload;
}

std::string hello_request() { return R"({"hello":1})"; }

std::string hello_response(std::string_view vocab_identifier, std::uint32_t size) {
    return json{{"vocab", vocab_identifier}, {"size", size}}.dump();
}

std::string predict_request(std::span<const TokenId> context, std::string_view vocab_identifier) {
    std::string out = R"({"ctx":[)";
    char buf[16];
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (i) out += ',';
        out.append(buf, std::to_chars(buf, buf + sizeof buf, context[i]).ptr);
    }
    out += R"(],"vocab":)";
    out += json(vocab_identifier).dump();
    out += '}';
    return out;
}

std::string probs_response(std::span<const double> probs) {
    std::string out = R"({"probs":[)";
    char buf[32];
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i) out += ',';
        // Same text as printf("%.9g").
        const auto r = std::to_chars(buf, buf + sizeof buf, probs[i], std::chars_format::general, 9);
        out.append(buf, r.ptr);
    }
    out += "]}";
    return out;
}

std::string error_response(std::string_view message) { return json{{"error", message}}.dump(); }

}  // namespace wire

namespace {

json parse_response(const std::string& payload) {
    json doc = json::parse(payload, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) fail(ErrorCode::ProtocolError, "response is not a JSON object");
    if (auto it = doc.find("error"); it != doc.end()) {
        fail(ErrorCode::ProtocolError, "server error: " + (it->is_string() ? it->get<std::string>() : it->dump()));
    }
    return doc;
}

// Strict reader for the common reply {"probs":[n,n,...]}. Returns false on
// anything else, including a count other than out.size(); the caller then
// falls back to the full JSON parser, which reports the precise error.
bool read_probs_fast(std::string_view s, std::span<double> out) {
    std::size_t i = 0;
    auto ws = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    };
    auto lit = [&](std::string_view l) {
        ws();
        if (s.substr(i, l.size()) != l) return false;
        i += l.size();
        return true;
    };
    auto digits = [&] {
        const std::size_t start = i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
        return i > start;
    };
    if (!lit("{") || !lit("\"probs\"") || !lit(":") || !lit("[")) return false;
    std::size_t n = 0;
    for (bool first = true;; first = false) {
        ws();
        if (i < s.size() && s[i] == ']') {
            if (!first) return false;
            break;
        }
        // JSON number grammar; from_chars alone would also take "inf" or "01".
        const std::size_t start = i;
        if (i < s.size() && s[i] == '-') ++i;
        if (i < s.size() && s[i] == '0') {
            ++i;
        } else if (!digits()) {
            return false;
        }
        if (i < s.size() && s[i] == '.' && (++i, !digits())) return false;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            if (!digits()) return false;
        }
        if (n == out.size()) return false;
        double v = 0.0;
        const auto r = std::from_chars(s.data() + start, s.data() + i, v);
        if (r.ec != std::errc() || r.ptr != s.data() + i) return false;
        out[n++] = v == 0.0 ? 0.0 : v;  // the JSON parser reads "-0" as integer zero
        ws();
        if (i < s.size() && s[i] == ',') {
            ++i;
            continue;
        }
        if (i < s.size() && s[i] == ']') break;
        return false;
    }
    ++i;
    if (!lit("}")) return false;
    ws();
    return i == s.size() && n == out.size();
}

Vocabulary handshake(Transport& t) {
    wire::write_frame(t, wire::hello_request());
    const json doc = parse_response(wire::read_frame(t));
    const auto vocab = doc.find("vocab");
    const auto size = doc.find("size");
    if (vocab == doc.end() || !vocab->is_string() || size == doc.end() || !size->is_number_integer()) {
        fail(ErrorCode::ProtocolError, "malformed handshake response");
    }
    const auto n = size->get<std::int64_t>();
    const auto id = vocab->get<std::string>();
    if (n < 2 || n > (std::int64_t{1} << 31) || id.empty()) {
        fail(ErrorCode::ProtocolError, "handshake declares an invalid vocabulary");
    }
    return Vocabulary(static_cast<std::uint32_t>(n), id);
}

}  // namespace

RemotePredictor::RemotePredictor(std::unique_ptr<Transport> transport, std::size_t max_context)
    : transport_(std::move(transport)), max_context_(max_context), vocab_(handshake(*transport_)) {}

void RemotePredictor::predict(std::span<const TokenId> context, std::span<double> out) {
    if (out.size() != vocab_.size()) fail(ErrorCode::InvalidArgument, "output size != vocabulary size");
    if (context.size() > max_context_) context = context.last(max_context_);
    wire::write_frame(*transport_, wire::predict_request(context, vocab_.identifier()));
    const std::string payload = wire::read_frame(*transport_);
    if (!read_probs_fast(payload, out)) {
        const json doc = parse_response(payload);
        const auto probs = doc.find("probs");
        if (probs == doc.end() || !probs->is_array()) fail(ErrorCode::ProtocolError, "response lacks a probs array");
        if (probs->size() != out.size()) {
            fail(ErrorCode::ProtocolError, "expected " + std::to_string(out.size()) + " weights, got " +
                                               std::to_string(probs->size()));
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            const json& w = (*probs)[i];
            if (!w.is_number()) fail(ErrorCode::ProtocolError, "non-numeric weight");
            out[i] = w.get<double>();
        }
    }
    for (const double w : out) {
        if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::ProtocolError, "negative or non-finite weight");
    }
    const double total = kernels::sum(out);
    if (!(total > 0.0) || !std::isfinite(total)) fail(ErrorCode::ProtocolError, "weights do not sum to a positive value");
    kernels::divide(out, total);
}

ProbabilityDistribution remote_predict(RemotePredictor& client, const TokenSequence& context) {
    return predict(client, context);
}

}  // namespace rankzip
