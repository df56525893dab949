#pragma once

#include "waveformer/engine.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace waveformer {

/// 10*log10(|ref|^2 / |ref - est|^2), clamped to [-80, +80] dB.
double snr(std::span<const float> ref, std::span<const float> est);

/// Scale-invariant SNR: project est onto ref, compare target vs residual
/// energy. No mean subtraction. Clamped to [-80, +80] dB.
double si_snr(std::span<const float> ref, std::span<const float> est);

/// si_snr(ref, est) - si_snr(ref, mixture).
double si_snri(std::span<const float> mixture, std::span<const float> ref,
               std::span<const float> est);

/// -(0.9 * snr + 0.1 * si_snr), the training objective evaluated as a metric.
double loss_value(std::span<const float> ref, std::span<const float> est);

struct BenchReport {
    std::string config_id;
    uint32_t chunk_samples = 0;
    double chunk_duration_ms = 0.0;
    double mean_us = 0.0;
    double median_us = 0.0;
    double p95_us = 0.0;
    double rtf = 0.0; // mean chunk time / chunk duration
    uint64_t macs_per_chunk = 0;
    int threads = 1;

    std::string to_kv() const;
    std::string to_json() const;
};

/// Times single-chunk pushes through a primed session on one thread with a
/// monotonic clock. Warmup iterations are excluded from the statistics.
BenchReport bench_rtf(const ModelWeights& weights, int iterations, int warmup = 16);

} // namespace waveformer
