#pragma once

// In-process stand-in for the probability server. Speaks the same framed
// JSON protocol, so RemotePredictor is exercised end to end without any
// model or network dependency.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rankzip/error.hpp"
#include "rankzip/remote.hpp"

namespace rankzip::testing {

using ModelFn = std::function<std::vector<double>(std::span<const TokenId>)>;

/// Deterministic peaked distribution keyed on the last two context tokens.
inline ModelFn hashed_model(std::uint32_t vocab_size, std::uint64_t seed = 0x9e3779b97f4a7c15ull) {
    return [vocab_size, seed](std::span<const TokenId> ctx) {
        std::uint64_t h = seed ^ ctx.size();
        for (std::size_t i = ctx.size() >= 2 ? ctx.size() - 2 : 0; i < ctx.size(); ++i) {
            h = (h ^ ctx[i]) * 0x100000001b3ull;
        }
        std::vector<double> w(vocab_size);
        for (std::uint32_t v = 0; v < vocab_size; ++v) {
            std::uint64_t x = h + 0x9e3779b97f4a7c15ull * (v + 1);
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
            x ^= x >> 31;
            const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
            w[v] = std::exp(-8.0 * u);  // a handful of likely tokens, a long tail
        }
        return w;
    };
}

/// Row i answers contexts of length i; longer contexts use the last row.
inline ModelFn table_model(std::vector<std::vector<double>> rows) {
    return [rows = std::move(rows)](std::span<const TokenId> ctx) {
        return rows[std::min(ctx.size(), rows.size() - 1)];
    };
}

class MockServer {
public:
    MockServer(std::string vocab_id, std::uint32_t vocab_size, ModelFn model)
        : vocab_id_(std::move(vocab_id)), vocab_size_(vocab_size), model_(std::move(model)) {}

    /// Replaces the normal reply when it returns a value.
    std::function<std::optional<std::string>(const nlohmann::json&)> intercept;

    std::size_t requests = 0;
    std::size_t last_context_length = 0;

    std::string handle(const std::string& payload) {
        ++requests;
        const auto doc = nlohmann::json::parse(payload, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) return wire::error_response("malformed request");
        if (intercept) {
            if (auto reply = intercept(doc)) return *reply;
        }
        if (doc.contains("hello")) return wire::hello_response(vocab_id_, vocab_size_);
        const auto ctx = doc.find("ctx");
        if (ctx == doc.end() || !ctx->is_array()) return wire::error_response("missing ctx");
        if (doc.value("vocab", std::string()) != vocab_id_) return wire::error_response("vocabulary mismatch");
        std::vector<TokenId> context;
        for (const auto& t : *ctx) {
            if (!t.is_number_unsigned() || t.get<std::uint64_t>() >= vocab_size_) return wire::error_response("bad token id");
            context.push_back(t.get<TokenId>());
        }
        last_context_length = context.size();
        return wire::probs_response(model_(context));
    }

private:
    std::string vocab_id_;
    std::uint32_t vocab_size_;
    ModelFn model_;
};

/// Transport that hands each complete request frame to a MockServer and
/// queues the framed reply for reading.
class LoopbackTransport final : public Transport {
public:
    explicit LoopbackTransport(std::shared_ptr<MockServer> server) : server_(std::move(server)) {}

    bool connected = true;

    void write_all(std::span<const std::uint8_t> bytes) override {
        if (!connected) fail(ErrorCode::RemoteUnavailable, "loopback disconnected");
        inbox_.insert(inbox_.end(), bytes.begin(), bytes.end());
        while (inbox_.size() >= 4) {
            const std::uint32_t n = (std::uint32_t{inbox_[0]} << 24) | (std::uint32_t{inbox_[1]} << 16) |
                                    (std::uint32_t{inbox_[2]} << 8) | inbox_[3];
            if (inbox_.size() < 4 + std::size_t{n}) break;
            const std::string request(inbox_.begin() + 4, inbox_.begin() + 4 + n);
            inbox_.erase(inbox_.begin(), inbox_.begin() + 4 + n);
            const std::string reply = server_->handle(request);
            const auto len = static_cast<std::uint32_t>(reply.size());
            for (int s = 24; s >= 0; s -= 8) outbox_.push_back(static_cast<std::uint8_t>(len >> s));
            outbox_.insert(outbox_.end(), reply.begin(), reply.end());
        }
    }

    void read_exact(std::span<std::uint8_t> bytes) override {
        if (!connected || outbox_.size() < bytes.size()) fail(ErrorCode::RemoteUnavailable, "loopback has no reply");
        std::copy_n(outbox_.begin(), bytes.size(), bytes.begin());
        outbox_.erase(outbox_.begin(), outbox_.begin() + static_cast<std::ptrdiff_t>(bytes.size()));
    }

    /// Queues raw bytes as if the server had sent them.
    void inject(std::span<const std::uint8_t> bytes) { outbox_.insert(outbox_.end(), bytes.begin(), bytes.end()); }

private:
    std::shared_ptr<MockServer> server_;
    std::deque<std::uint8_t> inbox_;
    std::deque<std::uint8_t> outbox_;
};

inline std::unique_ptr<RemotePredictor> make_mock_remote(std::shared_ptr<MockServer> server,
                                                         std::size_t max_context = RemotePredictor::kDefaultMaxContext) {
    return std::make_unique<RemotePredictor>(std::make_unique<LoopbackTransport>(std::move(server)), max_context);
}

/// Serves frames on a pair of file descriptors until the peer hangs up.
inline void serve_fds(MockServer& server, int in_fd, int out_fd) {
    auto read_exact = [&](void* buf, std::size_t n) {
        auto* p = static_cast<char*>(buf);
        while (n > 0) {
            const ssize_t r = ::read(in_fd, p, n);
            if (r <= 0) return false;
            p += r;
            n -= static_cast<std::size_t>(r);
        }
        return true;
    };
    auto write_all = [&](const void* buf, std::size_t n) {
        const auto* p = static_cast<const char*>(buf);
        while (n > 0) {
            const ssize_t w = ::write(out_fd, p, n);
            if (w <= 0) return false;
            p += w;
            n -= static_cast<std::size_t>(w);
        }
        return true;
    };
    for (;;) {
        std::uint8_t len[4];
        if (!read_exact(len, 4)) return;
        const std::uint32_t n = (std::uint32_t{len[0]} << 24) | (std::uint32_t{len[1]} << 16) |
                                (std::uint32_t{len[2]} << 8) | len[3];
        if (n > wire::kMaxFrameBytes) return;
        std::string request(n, '\0');
        if (!read_exact(request.data(), n)) return;
        const std::string reply = server.handle(request);
        const auto r = static_cast<std::uint32_t>(reply.size());
        const std::uint8_t hdr[4] = {static_cast<std::uint8_t>(r >> 24), static_cast<std::uint8_t>(r >> 16),
                                     static_cast<std::uint8_t>(r >> 8), static_cast<std::uint8_t>(r)};
        if (!write_all(hdr, 4) || !write_all(reply.data(), reply.size())) return;
    }
}

}  // namespace rankzip::testing
