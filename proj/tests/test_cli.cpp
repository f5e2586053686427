#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rankzip/cli.hpp"
#include "rankzip/error.hpp"
#include "test_util.hpp"

using namespace rankzip;
using namespace rankzip::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result rankzip_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rankzip");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "rankzip-cli-XXXXXX").string();
        REQUIRE(::mkdtemp(tmpl.data()) != nullptr);
        path_ = tmpl;
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write(const std::string& path, const std::string& contents) {
    std::ofstream(path, std::ios::binary) << contents;
}

const std::string kTrain = "ngram:k=3:train=" + fixture_path("caption_train.txt");

std::vector<std::string> leftovers(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

TEST_CASE("compress and decompress a caption with every backend") {
    TempDir dir;
    const std::string caption = fixture_path("captions/caption_07.txt");
    for (const std::string backend : {"deflate", "huffman", "arithmetic", "rank+deflate", "rank+huffman"}) {
        for (const std::string& pred : {std::string("uniform"), kTrain}) {
            CAPTURE(backend);
            CAPTURE(pred);
            auto r = rankzip_cli({"compress", caption, "-o", dir / "c.rkz", "--backend", backend, "--predictor", pred});
            REQUIRE(r.code == 0);
            CHECK(r.out.starts_with("symbols=" + std::to_string(slurp(caption).size()) + " output_bits="));
            // n-gram streams need the training corpus again; the others resolve from the header
            std::vector<std::string> args = {"decompress", dir / "c.rkz", "-o", dir / "out.txt"};
            if (pred != "uniform") args.insert(args.end(), {"--predictor", pred});
            r = rankzip_cli(args);
            REQUIRE(r.code == 0);
            CHECK(slurp(dir / "out.txt") == slurp(caption));
        }
    }
}

TEST_CASE("json stats") {
    TempDir dir;
    const auto r = rankzip_cli({"compress", fixture_path("captions/caption_01.txt"), "-o", dir / "c.rkz", "--backend",
                                "arithmetic", "--predictor", kTrain, "--json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["input_symbols"] == 271);
    CHECK(j["raw_bits"] == 271 * 8);
    CHECK(j["pipeline"] == "arithmetic");
    CHECK(j["output_bits"].get<double>() >= j["cross_entropy_bits"].get<double>());
    CHECK(j["container_bytes"] == fs::file_size(dir / "c.rkz"));
}

TEST_CASE("deflate-only is accepted as a backend alias") {
    TempDir dir;
    CHECK(rankzip_cli({"compress", fixture_path("captions/caption_01.txt"), "-o", dir / "c.rkz", "--backend", "deflate-only"}).code == 0);
}

TEST_CASE("outputs are deterministic") {
    TempDir dir;
    const auto in = fixture_path("captions/caption_03.txt");
    REQUIRE(rankzip_cli({"compress", in, "-o", dir / "a.rkz", "--predictor", kTrain}).code == 0);
    REQUIRE(rankzip_cli({"compress", in, "-o", dir / "b.rkz", "--predictor", kTrain}).code == 0);
    CHECK(slurp(dir / "a.rkz") == slurp(dir / "b.rkz"));
}

TEST_CASE("token file input") {
    TempDir dir;
    std::string tokens = "# rankzip-tokens vocab=llm-tok size=32000\n";
    for (int i = 0; i < 300; ++i) tokens += std::to_string((i * 7919) % 32000 / (1 + i % 5)) + "\n";
    write(dir / "in.tok", tokens);
    for (const std::string backend : {"deflate", "huffman", "arithmetic", "rank+huffman"}) {
        CAPTURE(backend);
        REQUIRE(rankzip_cli({"compress", dir / "in.tok", "--tokens", "-o", dir / "c.rkz", "--backend", backend, "--predictor", "uniform"}).code == 0);
        REQUIRE(rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.tok"}).code == 0);
        CHECK(slurp(dir / "out.tok") == tokens);
    }
}

TEST_CASE("empty input gives a zero-token container") {
    TempDir dir;
    write(dir / "empty.txt", "");
    auto r = rankzip_cli({"compress", dir / "empty.txt", "-o", dir / "c.rkz", "--predictor", "uniform"});
    REQUIRE(r.code == 0);
    r = rankzip_cli({"demux", dir / "c.rkz"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["token_count"] == 0);
    REQUIRE(rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt"}).code == 0);
    CHECK(fs::exists(dir / "out.txt"));
    CHECK(fs::file_size(dir / "out.txt") == 0);
}

TEST_CASE("tampered payload exits 5 and leaves no output") {
    TempDir dir;
    REQUIRE(rankzip_cli({"compress", fixture_path("captions/caption_02.txt"), "-o", dir / "c.rkz", "--predictor", "uniform", "--backend", "rank+huffman"}).code == 0);
    std::string bytes = slurp(dir / "c.rkz");
    bytes[bytes.size() - 3] ^= 0x10;
    write(dir / "c.rkz", bytes);
    const auto r = rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt"});
    CHECK(r.code == 5);
    CHECK(r.err.find("checksum") != std::string::npos);
    CHECK(leftovers(dir.path()) == std::vector<std::string>{"c.rkz"});
}

TEST_CASE("non-containers exit 5") {
    TempDir dir;
    CHECK(rankzip_cli({"decompress", dir / "nope.rkz", "-o", dir / "out.txt"}).code == 3);
    write(dir / "garbage.rkz", "RKZC garbage");
    CHECK(rankzip_cli({"decompress", dir / "garbage.rkz", "-o", dir / "out.txt"}).code == 5);
    write(dir / "zip.rkz", "PK\x03\x04");
    CHECK(rankzip_cli({"decompress", dir / "zip.rkz", "-o", dir / "out.txt"}).code == 5);
    CHECK_FALSE(fs::exists(dir / "out.txt"));
}

TEST_CASE("ngram stream without its training corpus") {
    TempDir dir;
    REQUIRE(rankzip_cli({"compress", fixture_path("captions/caption_04.txt"), "-o", dir / "c.rkz", "--predictor", kTrain}).code == 0);
    const auto r = rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt"});
    CHECK(r.code == 4);
    CHECK(r.err.find("train=") != std::string::npos);
    const auto wrong = rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt", "--predictor",
                                    "ngram:k=3:train=" + fixture_path("captions/caption_01.txt")});
    CHECK(wrong.code == 4);
    CHECK_FALSE(fs::exists(dir / "out.txt"));
}

TEST_CASE("remote predictor through a child server") {
    TempDir dir;
    const std::string server = std::string("remote:exec:") + RANKZIP_MOCK_SERVER + " bytes-v1 256";
    REQUIRE(rankzip_cli({"compress", fixture_path("captions/caption_05.txt"), "-o", dir / "c.rkz", "--predictor", server, "--backend", "arithmetic"}).code == 0);

    ::unsetenv(cli::kRemoteEnv);
    auto r = rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt"});
    CHECK(r.code == 4);
    CHECK(r.err.find(cli::kRemoteEnv) != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out.txt"));

    ::setenv(cli::kRemoteEnv, (std::string("exec:") + RANKZIP_MOCK_SERVER + " bytes-v1 256").c_str(), 1);
    r = rankzip_cli({"decompress", dir / "c.rkz", "-o", dir / "out.txt"});
    ::unsetenv(cli::kRemoteEnv);
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "out.txt") == slurp(fixture_path("captions/caption_05.txt")));
}

TEST_CASE("remote predictor with no server") {
    TempDir dir;
    const auto r = rankzip_cli({"compress", fixture_path("captions/caption_05.txt"), "-o", dir / "c.rkz", "--predictor",
                                "remote:unix:" + (dir / "missing.sock")});
    CHECK(r.code == 4);
    CHECK_FALSE(fs::exists(dir / "c.rkz"));
}

TEST_CASE("mux and demux") {
    TempDir dir;
    REQUIRE(rankzip_cli({"compress", fixture_path("captions/caption_06.txt"), "-o", dir / "c.rkz", "--predictor", "uniform"}).code == 0);
    write(dir / "image.bin", std::string(1000, '\x5a'));
    auto r = rankzip_cli({"mux", "--container", dir / "c.rkz", "--image", dir / "image.bin", "--width", "64", "--height", "32", "-o", dir / "m.rkz"});
    REQUIRE(r.code == 0);
    r = rankzip_cli({"demux", dir / "m.rkz", "--image-out", dir / "image.out", "--text-out", dir / "text.out"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["width"] == 64);
    CHECK(j["image_payload_bytes"] == 1000);
    CHECK(j["bpp"].get<double>() == doctest::Approx(8.0 * static_cast<double>(fs::file_size(dir / "m.rkz")) / (64 * 32)));
    CHECK(slurp(dir / "image.out") == slurp(dir / "image.bin"));
    REQUIRE(rankzip_cli({"decompress", dir / "m.rkz", "-o", dir / "out.txt"}).code == 0);
    CHECK(slurp(dir / "out.txt") == slurp(fixture_path("captions/caption_06.txt")));
    CHECK(rankzip_cli({"mux", "--container", dir / "c.rkz", "--width", "64", "-o", dir / "bad.rkz"}).code == 2);
}

TEST_CASE("bench reproduces the golden report") {
    TempDir dir;
    const auto r = rankzip_cli({"bench", fixture_path("captions"), "--predictor", kTrain, "--csv", dir / "report.csv"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "report.csv") == slurp(fixture_path("bench_golden.csv")));
    CHECK(r.out.find("Compression ratio") != std::string::npos);
}

TEST_CASE("bench of a single file matches compress") {
    TempDir dir;
    fs::create_directory(dir / "one");
    fs::copy_file(fixture_path("captions/caption_09.txt"), dir / "one/doc.txt");
    REQUIRE(rankzip_cli({"bench", dir / "one", "--pipelines", "none,rank+huffman", "--predictor", kTrain, "--csv", dir / "r.csv"}).code == 0);
    const auto c = rankzip_cli({"compress", dir / "one/doc.txt", "-o", dir / "c.rkz", "--backend", "rank+huffman", "--predictor", kTrain, "--json"});
    REQUIRE(c.code == 0);
    const auto j = nlohmann::json::parse(c.out);
    CHECK(slurp(dir / "r.csv").find("doc.txt," + std::to_string(j["raw_bits"].get<int>()) + "," +
                                    std::to_string(j["output_bits"].get<int>()) + "\n") != std::string::npos);
}

TEST_CASE("bench error policy") {
    TempDir dir;
    fs::create_directory(dir / "corpus");
    CHECK(rankzip_cli({"bench", dir / "corpus"}).code == 2);
    fs::copy_file(fixture_path("captions/caption_10.txt"), dir / "corpus/a.txt");
    fs::create_symlink(dir / "does-not-exist", dir / "corpus/b.txt");
    CHECK(rankzip_cli({"bench", dir / "corpus", "--predictor", "uniform"}).code == 3);
    const auto r = rankzip_cli({"bench", dir / "corpus", "--predictor", "uniform", "--lenient"});
    CHECK(r.code == 0);
    CHECK(r.err.find("skipping b.txt") != std::string::npos);
    CHECK(rankzip_cli({"bench", dir / "missing"}).code == 3);
    CHECK(rankzip_cli({"bench", dir / "corpus", "--pipelines", "none,zstd"}).code == 2);
}

TEST_CASE("metric subcommands") {
    TempDir dir;
    auto r = rankzip_cli({"ratio", "1055856", "598960"});
    CHECK(r.code == 0);
    CHECK(r.out == "ratio=43.27%\n");
    CHECK(rankzip_cli({"ratio", "0", "5"}).code == 2);

    r = rankzip_cli({"loss", "--rate", "0.04", "--lambda", "2", "--mse", "51", "--lpips", "0.5", "--clipiqa", "0.1", "--clipi2t", "0.3"});
    CHECK(r.code == 0);
    CHECK(r.out == "loss=0.54 distortion=0.25\n");
    CHECK(rankzip_cli({"loss", "--rate", "0", "--kappa", "1,2"}).code == 2);
    CHECK(rankzip_cli({"loss", "--rate", "0", "--mse", "300"}).code == 2);

    write(dir / "a.csv", "rate_bpp,quality\n0.1,30\n0.2,33\n0.4,36\n0.8,38.5\n");
    write(dir / "b.csv", "rate_bpp,quality\n0.05,30\n0.1,33\n0.2,36\n0.4,38.5\n");
    r = rankzip_cli({"bd-rate", dir / "a.csv", dir / "b.csv"});
    CHECK(r.code == 0);
    CHECK(r.out == "bd_rate=-50.0000%\n");
    write(dir / "c.csv", "rate_bpp,quality\n0.1,30\n0.2,33\n");
    CHECK(rankzip_cli({"bd-rate", dir / "a.csv", dir / "c.csv"}).code == 2);
}

TEST_CASE("usage errors exit 2") {
    CHECK(rankzip_cli({}).code == 2);
    CHECK(rankzip_cli({"frobnicate"}).code == 2);
    CHECK(rankzip_cli({"compress"}).code == 2);
    CHECK(rankzip_cli({"compress", "x", "-o", "y", "--backend", "lzma"}).code == 2);
    CHECK(rankzip_cli({"compress", fixture_path("captions/caption_01.txt"), "-o", "y", "--predictor", "ngram:k=0"}).code == 2);
    CHECK(rankzip_cli({"compress", "/nonexistent/input", "-o", "y"}).code == 3);
    CHECK(rankzip_cli({"--help"}).code == 0);
}

TEST_CASE("config file supplies defaults") {
    TempDir dir;
    write(dir / "rankzip.conf", "# defaults\nbackend = huffman\npredictor=uniform\n");
    const auto r = rankzip_cli({"--config", dir / "rankzip.conf", "compress", fixture_path("captions/caption_11.txt"), "-o", dir / "c.rkz"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("pipeline=huffman") != std::string::npos);
    write(dir / "bad.conf", "backend\n");
    CHECK(rankzip_cli({"--config", dir / "bad.conf", "compress", fixture_path("captions/caption_11.txt"), "-o", dir / "c.rkz"}).code == 2);
}

TEST_CASE("exit code table") {
    using E = ErrorCode;
    const std::vector<std::pair<E, int>> table = {
        {E::InvalidArgument, 2}, {E::Io, 3},          {E::RemoteUnavailable, 4}, {E::VocabMismatch, 4},
        {E::ProtocolError, 4},   {E::CorruptStream, 5}, {E::LengthMismatch, 5},  {E::NotAContainer, 5},
        {E::Truncated, 5},       {E::UnsupportedVersion, 5}, {E::InvalidHeader, 5}, {E::DivisionByZero, 2},
        {E::NoOverlap, 2},       {E::DegenerateCurve, 2}, {E::InvalidReading, 2}, {E::EmptyInput, 2}};
    for (const auto& [code, exit] : table) CHECK(cli::exit_code_for(code) == exit);
}
