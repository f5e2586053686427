#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankzip/cli.hpp"
#include "rankzip/codec.hpp"
#include "rankzip/kernels.hpp"
#include "rankzip/metrics.hpp"
#include "rankzip/token_file.hpp"

namespace rankzip::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::Io: return kIo;
        case ErrorCode::RemoteUnavailable:
        case ErrorCode::VocabMismatch:
        case ErrorCode::ProtocolError: return kRemote;
        case ErrorCode::CorruptStream:
        case ErrorCode::LengthMismatch:
        case ErrorCode::NotAContainer:
        case ErrorCode::Truncated:
        case ErrorCode::UnsupportedVersion:
        case ErrorCode::InvalidHeader: return kCorrupt;
        default: return kUsage;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorCode::Io, "cannot read " + path);
    return buf.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
    const fs::path target(path);
    const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    std::string tmpl = (dir / ("." + target.filename().string() + ".tmp-XXXXXX")).string();
    const int fd = ::mkstemp(tmpl.data());
    if (fd < 0) fail(ErrorCode::Io, "cannot create a temporary file next to " + path);
    std::size_t done = 0;
    while (done < contents.size()) {
        const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
        if (n <= 0) {
            ::close(fd);
            ::unlink(tmpl.c_str());
            fail(ErrorCode::Io, "cannot write " + path);
        }
        done += static_cast<std::size_t>(n);
    }
    if (::close(fd) != 0 || std::rename(tmpl.c_str(), path.c_str()) != 0) {
        ::unlink(tmpl.c_str());
        fail(ErrorCode::Io, "cannot write " + path);
    }
}

namespace {

std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string_view as_chars(std::span<const std::uint8_t> b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

TokenSequence load_input(const std::string& path, bool token_file) {
    const std::string data = read_file(path);
    if (!token_file) return bytes_to_tokens(as_bytes(data));
    std::istringstream in(data);
    return read_token_file(in);
}

// Bits of the uncompressed input: the file's bytes for byte-level text,
// otherwise ceil(log2 V) bits per token.
std::uint64_t raw_bits(const TokenSequence& tokens) {
    if (tokens.vocab() == Vocabulary::bytes()) return 8 * tokens.size();
    const auto width = static_cast<std::uint64_t>(std::bit_width(tokens.vocab().size() - 1));
    return width * tokens.size();
}

/// key=value defaults shared by all subcommands.
struct Config {
    std::map<std::string, std::string> values;

    static Config load(const std::string& path) {
        Config c;
        std::istringstream in(read_file(path));
        std::string line;
        for (int lineno = 1; std::getline(in, line); ++lineno) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(ErrorCode::InvalidArgument, path + ":" + std::to_string(lineno) + ": expected key=value");
            auto trim = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t\r"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
                return s;
            };
            c.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return c;
    }

    void apply(const std::string& key, const CLI::Option* opt, std::string& target) const {
        if (opt->count() > 0) return;
        if (const auto it = values.find(key); it != values.end()) target = it->second;
    }
};

struct Options {
    std::string config_path;
    int verbosity = 0;

    std::string input;
    std::string output;
    std::string predictor = "ngram:k=3";
    std::string backend = "rank+deflate";
    bool tokens = false;
    bool json_out = false;

    std::string container;
    std::string image;
    std::optional<std::uint32_t> width;
    std::optional<std::uint32_t> height;
    std::string text_out;
    std::string image_out;

    std::string corpus;
    std::string pipelines = "none,deflate,rank+deflate";
    std::string csv_out;
    bool lenient = false;

    std::string anchor;
    std::string test;
    std::string metric = "quality";
    bool lower_is_better = false;

    std::uint64_t baseline_bits = 0;
    std::uint64_t compressed_bits = 0;

    double rate = 0.0;
    double lambda = 1.0;
    std::vector<double> kappa = {0.5, 0.2, 0.2, 0.1};
    double mse = 0.0, lpips = 0.0, clipiqa = 0.0, clipi2t = 0.0;
    double max_mse = 255.0, max_lpips = 1.0, max_clipiqa = 1.0, max_clipi2t = 1.0;
};

Pipeline require_pipeline(const std::string& name) {
    const std::string n = name == "deflate-only" ? "deflate" : name;
    if (const auto p = parse_pipeline(n)) return *p;
    fail(ErrorCode::InvalidArgument, "unknown backend '" + name + "'; expected deflate, huffman, arithmetic, rank+deflate or rank+huffman");
}

std::optional<PredictorSpec> user_predictor(const CLI::Option* opt, const Options& o, const Config& cfg) {
    if (opt->count() > 0) return parse_predictor_spec(o.predictor);
    if (const auto it = cfg.values.find("predictor"); it != cfg.values.end()) return parse_predictor_spec(it->second);
    return std::nullopt;
}

int cmd_compress(const Options& o, std::ostream& out) {
    const Pipeline pipeline = require_pipeline(o.backend);
    const TokenSequence tokens = load_input(o.input, o.tokens);
    std::unique_ptr<Predictor> predictor;
    if (uses_predictor(pipeline)) predictor = make_predictor(parse_predictor_spec(o.predictor), tokens.vocab());

    CodingStats stats;
    const ContainerFile file = compress(pipeline, predictor.get(), tokens, &stats);
    const auto bytes = mux(file);
    write_file_atomic(o.output, as_chars(bytes));

    const std::uint64_t raw = raw_bits(tokens);
    const double ratio = raw ? compression_ratio(raw, stats.output_bits) : 0.0;
    if (o.json_out) {
        json j{{"input_symbols", stats.input_symbols},
               {"output_bits", stats.output_bits},
               {"raw_bits", raw},
               {"ratio_pct", ratio},
               {"container_bytes", bytes.size()},
               {"pipeline", pipeline_name(pipeline)},
               {"predictor", file.header.predictor_id}};
        if (stats.cross_entropy_bits) j["cross_entropy_bits"] = *stats.cross_entropy_bits;
        out << j.dump() << '\n';
    } else {
        char ratio_text[32];
        std::snprintf(ratio_text, sizeof ratio_text, "%.2f", ratio);
        out << "symbols=" << stats.input_symbols << " output_bits=" << stats.output_bits << " raw_bits=" << raw
            << " ratio=" << ratio_text << "% container_bytes=" << bytes.size() << " pipeline=" << pipeline_name(pipeline)
            << " predictor=" << file.header.predictor_id << '\n';
    }
    return kOk;
}

int cmd_decompress(const Options& o, const std::optional<PredictorSpec>& user) {
    const std::string data = read_file(o.input);
    const ContainerFile file = demux(as_bytes(data));
    const Vocabulary vocab(file.header.vocab_size, file.header.vocab_identifier);
    std::unique_ptr<Predictor> predictor;
    if (uses_predictor(file.header.pipeline)) predictor = resolve_predictor(file.header.predictor_id, vocab, user);
    const TokenSequence tokens = decompress(file, predictor.get());

    if (vocab == Vocabulary::bytes()) {
        const auto bytes = tokens_to_bytes(tokens);
        write_file_atomic(o.output, as_chars(bytes));
    } else {
        std::ostringstream text;
        write_token_file(text, tokens);
        write_file_atomic(o.output, text.str());
    }
    return kOk;
}

json header_json(const ContainerFile& file) {
    const ContainerHeader& h = file.header;
    json j{{"format_version", h.format_version},
           {"pipeline", pipeline_name(h.pipeline)},
           {"predictor_id", h.predictor_id},
           {"vocab_identifier", h.vocab_identifier},
           {"vocab_size", h.vocab_size},
           {"token_count", h.token_count},
           {"text_payload_bytes", h.text_payload_bytes},
           {"text_bits", file.text.bit_length},
           {"image_payload_bytes", h.image_payload_bytes},
           {"file_bytes", file.file_size()}};
    if (h.width) {
        j["width"] = *h.width;
        j["height"] = *h.height;
        j["bpp"] = *file.bits_per_pixel();
    }
    return j;
}

int cmd_mux(const Options& o, std::ostream& out) {
    if (o.width.has_value() != o.height.has_value()) fail(ErrorCode::InvalidArgument, "--width and --height go together");
    const std::string data = read_file(o.container);
    ContainerFile file = demux(as_bytes(data));
    file.verify_payload_crc();
    const std::string image = o.image.empty() ? std::string() : read_file(o.image);
    ContainerHeader h = file.header;
    h.width = o.width;
    h.height = o.height;
    const ContainerFile muxed =
        make_container(std::move(h), std::move(file.text), std::vector<std::uint8_t>(image.begin(), image.end()));
    const auto bytes = mux(muxed);
    write_file_atomic(o.output, as_chars(bytes));
    out << header_json(muxed).dump() << '\n';
    return kOk;
}

int cmd_demux(const Options& o, std::ostream& out) {
    const std::string data = read_file(o.input);
    const ContainerFile file = demux(as_bytes(data));
    file.verify_payload_crc();
    if (!o.text_out.empty()) write_file_atomic(o.text_out, as_chars(file.text.bytes));
    if (!o.image_out.empty()) write_file_atomic(o.image_out, as_chars(file.image));
    out << header_json(file).dump() << '\n';
    return kOk;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
    const auto names = split_list(o.pipelines);
    if (names.empty()) fail(ErrorCode::InvalidArgument, "no pipelines given");
    std::vector<std::optional<Pipeline>> pipelines;  // nullopt = raw baseline
    for (const auto& n : names) pipelines.push_back(n == "none" ? std::nullopt : std::optional(require_pipeline(n)));

    std::error_code ec;
    if (!fs::is_directory(o.corpus, ec)) fail(ErrorCode::Io, "corpus directory " + o.corpus + " not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.corpus)) {
        if (!entry.is_directory(ec)) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    const bool needs_predictor = std::any_of(pipelines.begin(), pipelines.end(),
                                             [](const auto& p) { return p && uses_predictor(*p); });
    std::unique_ptr<Predictor> predictor;
    std::vector<std::pair<std::string, std::vector<std::uint64_t>>> rows;
    for (const auto& path : files) {
        std::optional<TokenSequence> tokens;
        try {
            tokens = load_input(path.string(), o.tokens);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Io || !o.lenient) throw;
            err << "warning: skipping " << path.filename().string() << ": " << e.what() << '\n';
            continue;
        }
        if (needs_predictor && !predictor) predictor = make_predictor(parse_predictor_spec(o.predictor), tokens->vocab());

        std::vector<std::uint64_t> bits;
        for (const auto& p : pipelines) {
            if (!p) {
                bits.push_back(raw_bits(*tokens));
                continue;
            }
            Predictor* pred = uses_predictor(*p) ? predictor.get() : nullptr;
            if (pred) require_same_vocab(pred->vocabulary(), tokens->vocab());
            const EncodedText enc = encode_tokens(*p, pred, *tokens);
            if (decode_tokens(*p, pred, enc.bitstream, tokens->vocab(), tokens->size()) != *tokens) {
                fail(ErrorCode::CorruptStream, "round trip failed for " + path.string());
            }
            bits.push_back(enc.bitstream.bit_length);
        }
        rows.emplace_back(path.filename().string(), std::move(bits));
    }
    const RatioReport report = ratio_report(names, std::move(rows));
    out << report.to_text();
    if (!o.csv_out.empty()) write_file_atomic(o.csv_out, report.to_csv());
    return kOk;
}

int cmd_bd_rate(const Options& o, std::ostream& out) {
    auto load = [&](const std::string& path) {
        std::istringstream in(read_file(path));
        return read_rd_curve_csv(in, o.metric, o.lower_is_better);
    };
    const double bd = bd_rate(load(o.anchor), load(o.test));
    char buf[64];
    std::snprintf(buf, sizeof buf, "bd_rate=%.4f%%\n", bd);
    out << buf;
    return kOk;
}

int cmd_ratio(const Options& o, std::ostream& out) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "ratio=%.2f%%\n", compression_ratio(o.baseline_bits, o.compressed_bits));
    out << buf;
    return kOk;
}

int cmd_loss(const Options& o, std::ostream& out) {
    if (o.kappa.size() != 4) fail(ErrorCode::InvalidArgument, "--kappa takes four comma-separated weights");
    LossWeights w;
    w.lambda = o.lambda;
    std::copy(o.kappa.begin(), o.kappa.end(), w.kappa.begin());
    MetricReadings m;
    m.rate = o.rate;
    m.losses = {o.mse, o.lpips, o.clipiqa, o.clipi2t};
    m.maxima = {o.max_mse, o.max_lpips, o.max_clipiqa, o.max_clipi2t};
    const LossResult r = aggregate_loss(w, m);
    char buf[96];
    std::snprintf(buf, sizeof buf, "loss=%.12g distortion=%.12g\n", r.loss, r.distortion);
    out << buf;
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rankzip: predictive text compression toolkit", "rankzip"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "key=value defaults (predictor, backend, pipelines)");
    app.add_flag("-v,--verbose", o.verbosity, "Print diagnostics to stderr");

    auto* compress_cmd = app.add_subcommand("compress", "Compress a text or token file into a container");
    compress_cmd->add_option("input", o.input, "Input file")->required();
    compress_cmd->add_option("-o,--output", o.output, "Output container")->required();
    auto* c_pred = compress_cmd->add_option("--predictor", o.predictor, "uniform | ngram:k=K[:train=PATH] | remote[:ADDR]");
    auto* c_backend = compress_cmd->add_option("--backend", o.backend, "deflate | huffman | arithmetic | rank+deflate | rank+huffman");
    compress_cmd->add_flag("--tokens", o.tokens, "Input is a token file rather than byte-level text");
    compress_cmd->add_flag("--json", o.json_out, "Print coding stats as JSON");

    auto* decompress_cmd = app.add_subcommand("decompress", "Restore the original text from a container");
    decompress_cmd->add_option("input", o.input, "Input container")->required();
    decompress_cmd->add_option("-o,--output", o.output, "Output file")->required();
    auto* d_pred = decompress_cmd->add_option("--predictor", o.predictor, "Override the predictor recorded in the header");

    auto* mux_cmd = app.add_subcommand("mux", "Attach an image payload to a text container");
    mux_cmd->add_option("--container", o.container, "Container holding the text bitstream")->required();
    mux_cmd->add_option("--image", o.image, "Opaque image bitstream");
    mux_cmd->add_option("--width", o.width, "Image width in pixels");
    mux_cmd->add_option("--height", o.height, "Image height in pixels");
    mux_cmd->add_option("-o,--output", o.output, "Output container")->required();

    auto* demux_cmd = app.add_subcommand("demux", "Print a container header and optionally extract its payloads");
    demux_cmd->add_option("input", o.input, "Input container")->required();
    demux_cmd->add_option("--text-out", o.text_out, "Write the text bitstream here");
    demux_cmd->add_option("--image-out", o.image_out, "Write the image bitstream here");

    auto* bench_cmd = app.add_subcommand("bench", "Compare pipelines over a corpus directory");
    bench_cmd->add_option("corpus", o.corpus, "Directory of documents")->required();
    auto* b_pipes = bench_cmd->add_option("--pipelines", o.pipelines, "Comma-separated list; 'none' is the raw baseline");
    auto* b_pred = bench_cmd->add_option("--predictor", o.predictor, "Predictor for predictive pipelines");
    bench_cmd->add_option("--csv", o.csv_out, "Also write the report as CSV");
    bench_cmd->add_flag("--tokens", o.tokens, "Documents are token files");
    bench_cmd->add_flag("--lenient", o.lenient, "Skip unreadable documents with a warning");

    auto* bd_cmd = app.add_subcommand("bd-rate", "Bjontegaard delta rate of TEST against ANCHOR");
    bd_cmd->add_option("anchor", o.anchor, "Anchor curve CSV (rate_bpp,quality)")->required();
    bd_cmd->add_option("test", o.test, "Test curve CSV (rate_bpp,quality)")->required();
    bd_cmd->add_option("--metric", o.metric, "Metric name");
    bd_cmd->add_flag("--lower-is-better", o.lower_is_better, "Metric improves downwards (e.g. LPIPS)");

    auto* ratio_cmd = app.add_subcommand("ratio", "Compression ratio of COMPRESSED bits against BASELINE bits");
    ratio_cmd->add_option("baseline", o.baseline_bits)->required();
    ratio_cmd->add_option("compressed", o.compressed_bits)->required();

    auto* loss_cmd = app.add_subcommand("loss", "Rate plus lambda-weighted normalized distortion");
    loss_cmd->add_option("--rate", o.rate, "Average bitrate R")->required();
    loss_cmd->add_option("--lambda", o.lambda, "Rate-distortion trade-off");
    loss_cmd->add_option("--kappa", o.kappa, "Weights for MSE,LPIPS,CLIP-IQA,CLIP-I2T")->delimiter(',');
    loss_cmd->add_option("--mse", o.mse);
    loss_cmd->add_option("--lpips", o.lpips);
    loss_cmd->add_option("--clipiqa", o.clipiqa);
    loss_cmd->add_option("--clipi2t", o.clipi2t);
    loss_cmd->add_option("--max-mse", o.max_mse);
    loss_cmd->add_option("--max-lpips", o.max_lpips);
    loss_cmd->add_option("--max-clipiqa", o.max_clipiqa);
    loss_cmd->add_option("--max-clipi2t", o.max_clipi2t);

    std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        Config cfg;
        if (!o.config_path.empty()) cfg = Config::load(o.config_path);
        cfg.apply("predictor", c_pred, o.predictor);
        cfg.apply("backend", c_backend, o.backend);
        cfg.apply("pipelines", b_pipes, o.pipelines);
        cfg.apply("predictor", b_pred, o.predictor);
        if (o.verbosity > 0) err << "kernels: " << kernels::to_string(kernels::active().isa) << '\n';

        if (*compress_cmd) return cmd_compress(o, out);
        if (*decompress_cmd) return cmd_decompress(o, user_predictor(d_pred, o, cfg));
        if (*mux_cmd) return cmd_mux(o, out);
        if (*demux_cmd) return cmd_demux(o, out);
        if (*bench_cmd) return cmd_bench(o, out, err);
        if (*bd_cmd) return cmd_bd_rate(o, out);
        if (*ratio_cmd) return cmd_ratio(o, out);
        if (*loss_cmd) return cmd_loss(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }
    return kUsage;
}

}  // namespace rankzip::cli
