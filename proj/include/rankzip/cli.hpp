#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankzip/error.hpp"
#include "rankzip/predictor.hpp"

namespace rankzip::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kIo = 3,
    kRemote = 4,  // protocol, remote availability, predictor/vocabulary mismatch
    kCorrupt = 5,
};

int exit_code_for(ErrorCode code) noexcept;

/// Environment variable holding the default remote predictor address.
inline constexpr const char* kRemoteEnv = "RANKZIP_REMOTE";

/// --predictor value: uniform | ngram:k=K[:train=PATH] | remote[:ADDR]
struct PredictorSpec {
    enum class Kind { Uniform, Ngram, Remote };
    Kind kind = Kind::Uniform;
    unsigned order = 3;
    std::optional<std::string> train_path;
    std::string address;  // empty: use RANKZIP_REMOTE
};

PredictorSpec parse_predictor_spec(std::string_view text);

/// Builds the predictor a spec describes for input over `vocab`. A remote
/// predictor must report the same vocabulary.
std::unique_ptr<Predictor> make_predictor(const PredictorSpec& spec, const Vocabulary& vocab);

/// Picks the predictor needed to decode a container whose header records
/// `predictor_id`: the user's spec when given, otherwise whatever can be
/// rebuilt from the header alone. Returns null for predictor-less streams.
std::unique_ptr<Predictor> resolve_predictor(const std::string& predictor_id, const Vocabulary& vocab,
                                             const std::optional<PredictorSpec>& user);

/// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

/// Entry point shared by the rankzip binary and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankzip::cli
