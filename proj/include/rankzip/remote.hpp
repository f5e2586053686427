#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankzip/predictor.hpp"

namespace rankzip {

/// Reliable byte stream to a probability server. All failures surface as
/// Error(RemoteUnavailable).
class Transport {
public:
    virtual ~Transport() = default;
    virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
    virtual void read_exact(std::span<std::uint8_t> bytes) = 0;
};

/// Opens a transport from an address:
///   unix:PATH        Unix domain socket
///   exec:COMMAND     spawn `/bin/sh -c COMMAND`, talk over its stdin/stdout
///   HOST:PORT        TCP
std::unique_ptr<Transport> open_transport(const std::string& address);

/// Length-prefixed JSON framing: 4-byte big-endian payload length, then
/// UTF-8 JSON.
namespace wire {

inline constexpr std::uint32_t kMaxFrameBytes = 64u << 20;

void write_frame(Transport& t, std::string_view payload);
std::string read_frame(Transport& t);

std::string hello_request();
std::string hello_response(std::string_view vocab_identifier, std::uint32_t size);
std::string predict_request(std::span<const TokenId> context, std::string_view vocab_identifier);
/// Weights printed with 9 significant digits so repeated answers are byte-identical.
std::string probs_response(std::span<const double> probs);
std::string error_response(std::string_view message);

}  // namespace wire

/// Client side of the probability protocol. The handshake runs in the
/// constructor and fixes vocabulary(). Contexts longer than max_context are
/// truncated oldest-first before being sent.
class RemotePredictor final : public Predictor {
public:
    static constexpr std::size_t kDefaultMaxContext = 1024;

    explicit RemotePredictor(std::unique_ptr<Transport> transport,
                             std::size_t max_context = kDefaultMaxContext);

    const Vocabulary& vocabulary() const override { return vocab_; }
    std::string id() const override { return "remote:" + vocab_.identifier(); }
    void predict(std::span<const TokenId> context, std::span<double> out) override;

    std::size_t max_context() const noexcept { return max_context_; }

private:
    std::unique_ptr<Transport> transport_;
    std::size_t max_context_;
    Vocabulary vocab_;
};

/// Server distribution for `context`, renormalized to sum to 1.
ProbabilityDistribution remote_predict(RemotePredictor& client, const TokenSequence& context);

}  // namespace rankzip
