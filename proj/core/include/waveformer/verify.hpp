#pragma once

#include "waveformer/engine.hpp"

#include <string>
#include <utility>
#include <vector>

namespace waveformer {

struct ProbeResult {
    std::string name;
    bool pass = false;
    double max_diff = 0.0;
    std::string detail;
};

/// Streaming session output vs the offline reference on seeded noise.
/// Passes when the max abs sample difference is below 1e-4.
ProbeResult probe_stream_offline(const ModelWeights& weights, uint64_t seed,
                                 double seconds);

/// Output must be bitwise independent of how input is split across pushes.
ProbeResult probe_push_granularity(const ModelWeights& weights, uint64_t seed);

/// Perturbing input samples beyond a chunk's lookahead horizon must leave
/// that chunk's output bitwise unchanged.
ProbeResult probe_chunk_causality(const ModelWeights& weights, uint64_t seed,
                                  int probes);

/// The mask for chunk k must depend only on encoded chunks k and k-1.
ProbeResult probe_decoder_window(const ModelWeights& weights, uint64_t seed);

/// Encoder receptive-field probes on an internal reduced-width config with
/// the given kernel size and layer count: first result checks bitwise
/// invariance beyond (P-1)(2^M - 1) latent frames, second checks that a
/// frame exactly at that distance still influences the output.
std::pair<ProbeResult, ProbeResult> probe_receptive_field(uint32_t kernel,
                                                          uint32_t layers,
                                                          uint64_t seed);

/// The full suite the `verify` subcommand runs.
std::vector<ProbeResult> run_property_suite(const ModelWeights& weights, uint64_t seed,
                                            double seconds);

} // namespace waveformer
