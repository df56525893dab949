#include "waveformer/audio.hpp"
#include "waveformer/checkpoint.hpp"
#include "waveformer/engine.hpp"
#include "waveformer/errors.hpp"
#include "waveformer/metrics.hpp"
#include "waveformer/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace waveformer;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

[[noreturn]] void fail(const char* code, const std::string& msg, int exit_code) {
    std::cerr << "error: " << code << ": " << msg << "\n";
    std::exit(exit_code);
}

std::vector<std::string> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file: " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        labels.push_back(line);
    }
    return labels;
}

QueryVector parse_classes(const std::string& spec, uint32_t num_classes,
                          const std::string& labels_path) {
    QueryVector q;
    q.bits.assign(num_classes, 0);
    std::vector<std::string> labels;
    if (!labels_path.empty()) labels = read_labels(labels_path);

    std::istringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        long idx = -1;
        try {
            size_t used = 0;
            idx = std::stol(tok, &used);
            if (used != tok.size()) idx = -1;
        } catch (const std::exception&) {
            idx = -1;
        }
        if (idx < 0) {
            // not an index; try the label sidecar
            for (size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == tok) {
                    idx = static_cast<long>(i);
                    break;
                }
            if (idx < 0)
                throw std::invalid_argument("unknown class '" + tok + "'" +
                                            (labels.empty() ? " (no label file given)"
                                                            : ""));
        }
        if (idx >= static_cast<long>(num_classes))
            throw std::invalid_argument("class index " + std::to_string(idx) +
                                        " out of range [0, " +
                                        std::to_string(num_classes) + ")");
        q.bits[static_cast<size_t>(idx)] = 1;
    }
    if (!q.any()) throw std::invalid_argument("at least one class required");
    return q;
}

NamedTensorSet load_weights(const std::string& path, const std::string& config_path) {
    NamedTensorSet set = load_checkpoint(path);
    if (!config_path.empty()) {
        const ModelConfig over = load_config(config_path);
        // only geometry-compatible overrides; dimensions stay with the checkpoint
        if (over.encoder_dim != set.config.encoder_dim ||
            over.decoder_dim != set.config.decoder_dim ||
            over.dcc_layers != set.config.dcc_layers ||
            over.dcc_kernel != set.config.dcc_kernel ||
            over.num_classes != set.config.num_classes ||
            over.heads != set.config.heads || over.ffn_dim != set.config.ffn_dim ||
            over.embed_hidden != set.config.embed_hidden)
            throw std::invalid_argument(
                "--config may not change model dimensions, only chunk geometry");
        set.config.chunk_frames = over.chunk_frames;
        set.config.sample_rate = over.sample_rate;
    }
    return set;
}

int cmd_extract(const std::string& weights_path, const std::string& input_path,
                const std::string& output_path, const std::string& classes,
                const std::string& config_path, const std::string& labels_path,
                bool pcm16) {
    const NamedTensorSet set = load_weights(weights_path, config_path);
    auto weights = std::make_shared<const ModelWeights>(ModelWeights::bind(set));
    const QueryVector q = parse_classes(classes, set.config.num_classes, labels_path);

    AudioBuffer in = read_wav(input_path);
    if (in.sample_rate != set.config.sample_rate)
        std::cerr << "warning: input sample rate " << in.sample_rate
                  << " Hz differs from model rate " << set.config.sample_rate
                  << " Hz, processing as-is\n";

    StreamSession session(weights, q);
    const auto t0 = std::chrono::steady_clock::now();
    AudioBuffer out;
    out.sample_rate = in.sample_rate;
    out.samples = session.push(std::span<const float>(in.samples));
    auto rest = session.flush();
    out.samples.insert(out.samples.end(), rest.begin(), rest.end());
    const auto t1 = std::chrono::steady_clock::now();

    write_wav(output_path, out, pcm16 ? WavFormat::Pcm16 : WavFormat::Float32);
    std::cout << "chunks=" << session.chunks_processed() << " samples="
              << out.samples.size() << " wall_ms="
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& weights_path, uint64_t seed, double seconds) {
    std::shared_ptr<const ModelWeights> weights;
    if (weights_path.empty()) {
        weights = std::make_shared<const ModelWeights>(
            ModelWeights::bind(random_init(ModelConfig{}, seed)));
    } else {
        weights = std::make_shared<const ModelWeights>(
            ModelWeights::bind(load_checkpoint(weights_path)));
    }
    const auto results = run_property_suite(*weights, seed, seconds);
    bool all = true;
    for (const auto& r : results) {
        std::cout << r.name << ": " << (r.pass ? "PASS" : "FAIL") << " (" << r.detail
                  << ")\n";
        all = all && r.pass;
    }
    return all ? kExitOk : kExitValidation;
}

int cmd_bench(const std::string& weights_path, int iters, int warmup) {
    const NamedTensorSet set = load_checkpoint(weights_path);
    const ModelWeights weights = ModelWeights::bind(set);
    const BenchReport report = bench_rtf(weights, iters, warmup);
    std::cout << report.to_kv() << report.to_json() << "\n";
    return kExitOk;
}

int cmd_init_weights(const std::string& config_path, uint64_t seed,
                     const std::string& out_path) {
    ModelConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    save_checkpoint(random_init(cfg, seed), out_path);
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& ref_path, const std::string& est_path,
             const std::string& mix_path) {
    const AudioBuffer ref = read_wav(ref_path);
    const AudioBuffer est = read_wav(est_path);
    std::cout << "snr_db=" << snr(ref.samples, est.samples) << "\n"
              << "si_snr_db=" << si_snr(ref.samples, est.samples) << "\n";
    if (!mix_path.empty()) {
        const AudioBuffer mix = read_wav(mix_path);
        std::cout << "si_snri_db=" << si_snri(mix.samples, ref.samples, est.samples)
                  << "\n";
    }
    std::cout << "loss=" << loss_value(ref.samples, est.samples) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming target sound extraction"};
    app.require_subcommand(1);

    std::string weights, input, output, classes, config, labels, ref, est, mix, out_path;
    uint64_t seed = 0;
    double seconds = 1.0;
    int iters = 100, warmup = 16;
    bool pcm16 = false;

    auto* extract = app.add_subcommand("extract", "Extract target classes from a mixture");
    extract->add_option("--weights", weights)->required();
    extract->add_option("--input", input)->required();
    extract->add_option("--output", output)->required();
    extract->add_option("--classes", classes)->required();
    extract->add_option("--config", config);
    extract->add_option("--labels", labels);
    extract->add_flag("--pcm16", pcm16, "write 16-bit PCM instead of float32");

    auto* verify = app.add_subcommand("verify", "Run the streaming property suite");
    verify->add_option("--weights", weights);
    verify->add_option("--seed", seed);
    verify->add_option("--seconds", seconds);

    auto* bench = app.add_subcommand("bench", "Measure per-chunk runtime and RTF");
    bench->add_option("--weights", weights)->required();
    bench->add_option("--iters", iters);
    bench->add_option("--warmup", warmup);

    auto* init = app.add_subcommand("init-weights", "Write a seeded random checkpoint");
    init->add_option("--config", config);
    init->add_option("--seed", seed);
    init->add_option("--out", out_path)->required();

    auto* eval = app.add_subcommand("eval", "Report SNR / SI-SNR for an estimate");
    eval->add_option("--ref", ref)->required();
    eval->add_option("--est", est)->required();
    eval->add_option("--mix", mix);

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed())
            return cmd_extract(weights, input, output, classes, config, labels, pcm16);
        if (verify->parsed()) return cmd_verify(weights, seed, seconds);
        if (bench->parsed()) return cmd_bench(weights, iters, warmup);
        if (init->parsed()) return cmd_init_weights(config, seed, out_path);
        if (eval->parsed()) return cmd_eval(ref, est, mix);
    } catch (const IoError& e) {
        fail("io", e.what(), kExitIo);
    } catch (const FormatError& e) {
        fail("format", e.what(), kExitValidation);
    } catch (const ValidationError& e) {
        fail("validation", e.what(), kExitValidation);
    } catch (const std::invalid_argument& e) {
        fail("invalid-argument", e.what(), kExitValidation);
    } catch (const std::exception& e) {
        fail("internal", e.what(), kExitValidation);
    }
    return kExitOk;
}
