#include "waveformer/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace waveformer {

namespace {

constexpr double kClampDb = 80.0;

double clamp_db(double db) { return std::clamp(db, -kClampDb, kClampDb); }

double energy(std::span<const float> x) {
    double e = 0.0;
    for (float v : x) e += static_cast<double>(v) * v;
    return e;
}

void check_lengths(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("metric inputs must have equal length");
    if (a.empty())
        throw std::invalid_argument("metric inputs must be non-empty");
}

} // namespace

double snr(std::span<const float> ref, std::span<const float> est) {
    check_lengths(ref, est);
    double err = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        const double d = static_cast<double>(ref[i]) - est[i];
        err += d * d;
    }
    const double sig = energy(ref);
    if (err == 0.0) return kClampDb;
    if (sig == 0.0) return -kClampDb;
    return clamp_db(10.0 * std::log10(sig / err));
}

double si_snr(std::span<const float> ref, std::span<const float> est) {
    check_lengths(ref, est);
    const double ref_energy = energy(ref);
    if (ref_energy == 0.0)
        throw std::invalid_argument("si_snr: reference must not be all-zero");
    double dot = 0.0;
    for (size_t i = 0; i < ref.size(); ++i)
        dot += static_cast<double>(est[i]) * ref[i];
    const double scale = dot / ref_energy;
    double target = 0.0, residual = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        const double t = scale * ref[i];
        const double e = static_cast<double>(est[i]) - t;
        target += t * t;
        residual += e * e;
    }
    if (residual == 0.0) return kClampDb;
    if (target == 0.0) return -kClampDb;
    return clamp_db(10.0 * std::log10(target / residual));
}

double si_snri(std::span<const float> mixture, std::span<const float> ref,
               std::span<const float> est) {
    return si_snr(ref, est) - si_snr(ref, mixture);
}

double loss_value(std::span<const float> ref, std::span<const float> est) {
    return -(0.9 * snr(ref, est) + 0.1 * si_snr(ref, est));
}

std::string BenchReport::to_kv() const {
    std::ostringstream s;
    s << "config_id=" << config_id << "\n"
      << "chunk_samples=" << chunk_samples << "\n"
      << "chunk_duration_ms=" << chunk_duration_ms << "\n"
      << "mean_us=" << mean_us << "\n"
      << "median_us=" << median_us << "\n"
      << "p95_us=" << p95_us << "\n"
      << "rtf=" << rtf << "\n"
      << "macs_per_chunk=" << macs_per_chunk << "\n"
      << "threads=" << threads << "\n";
    return s.str();
}

std::string BenchReport::to_json() const {
    std::ostringstream s;
    s << "{\"config_id\":\"" << config_id << "\",\"chunk_samples\":" << chunk_samples
      << ",\"chunk_duration_ms\":" << chunk_duration_ms << ",\"mean_us\":" << mean_us
      << ",\"median_us\":" << median_us << ",\"p95_us\":" << p95_us
      << ",\"rtf\":" << rtf << ",\"macs_per_chunk\":" << macs_per_chunk
      << ",\"threads\":" << threads << "}";
    return s.str();
}

BenchReport bench_rtf(const ModelWeights& weights, int iterations, int warmup) {
    if (iterations < 1)
        throw std::invalid_argument("bench_rtf: iterations must be >= 1");

    const ModelConfig& cfg = weights.config;
    const uint32_t S = cfg.chunk_samples();

    QueryVector q;
    q.bits.assign(cfg.num_classes, 0);
    q.bits[0] = 1;
    auto shared = std::make_shared<const ModelWeights>(weights);
    StreamSession session(shared, q);

    // deterministic noise input
    uint64_t rng = 0x9e3779b97f4a7c15ull;
    auto next_sample = [&rng]() {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        return static_cast<float>(static_cast<int64_t>(rng >> 11) * 0x1.0p-53 - 0.5);
    };
    std::vector<float> chunk(S);

    // prime: S + 2L samples gets the first chunk out of the way
    std::vector<float> prime(S + cfg.lookahead_samples());
    for (auto& v : prime) v = next_sample();
    session.push(std::span<const float>(prime));

    BenchReport report;
    {
        std::ostringstream id;
        id << "E" << cfg.encoder_dim << "_D" << cfg.decoder_dim << "_K"
           << cfg.chunk_frames << "_L" << cfg.conv_stride << "_M" << cfg.dcc_layers;
        report.config_id = id.str();
    }
    report.chunk_samples = S;
    report.chunk_duration_ms = 1000.0 * S / cfg.sample_rate;
    report.threads = 1;

    std::vector<double> times_us;
    times_us.reserve(static_cast<size_t>(iterations));
    for (int it = -warmup; it < iterations; ++it) {
        for (auto& v : chunk) v = next_sample();
        if (it == 0) mac_reset();
        const auto t0 = std::chrono::steady_clock::now();
        auto out = session.push(std::span<const float>(chunk));
        const auto t1 = std::chrono::steady_clock::now();
        if (it == 0) report.macs_per_chunk = mac_count();
        if (it >= 0)
            times_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }

    std::vector<double> sorted = times_us;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double t : times_us) sum += t;
    report.mean_us = sum / static_cast<double>(times_us.size());
    report.median_us = sorted[sorted.size() / 2];
    report.p95_us = sorted[static_cast<size_t>(0.95 * static_cast<double>(sorted.size() - 1))];
    report.rtf = report.mean_us / (1000.0 * report.chunk_duration_ms);
    return report;
}

} // namespace waveformer
