#pragma once

#include <cstdint>
#include <string>

namespace waveformer {

/// Architecture hyperparameters. Field comments give the conventional
/// symbol used in the config file keys.
struct ModelConfig {
    uint32_t conv_stride = 32;     // L, front-end stride in samples
    uint32_t encoder_dim = 512;    // E, latent feature dimension
    uint32_t decoder_dim = 256;    // D, decoder feature dimension
    uint32_t chunk_frames = 13;    // K, chunk length in latent frames
    uint32_t dcc_layers = 10;      // M, dilated conv layer count
    uint32_t dcc_kernel = 3;       // P, dilated conv kernel size
    uint32_t num_classes = 41;     // N_c, query classes
    uint32_t heads = 8;            // attention heads
    uint32_t ffn_dim = 1024;       // decoder feed-forward width
    uint32_t embed_hidden = 512;   // query embedding hidden width
    uint32_t sample_rate = 44100;  // Hz

    uint32_t chunk_samples() const { return chunk_frames * conv_stride; }     // S
    uint32_t lookahead_samples() const { return 2 * conv_stride; }            // 2L
    uint32_t frontend_kernel() const { return 3 * conv_stride; }              // 3L

    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

struct ChunkGeometry {
    uint32_t samples_per_chunk;
    double chunk_duration_ms;
    uint32_t lookahead_samples;
    double lookahead_ms;
    double receptive_field_seconds;
};

/// Receptive field of a stack of `layers` dilated causal conv layers with
/// kernel size `kernel` and dilations 1, 2, 4, ..., in latent frames:
/// (kernel - 1) * (2^layers - 1).
uint64_t receptive_field_frames(uint32_t kernel, uint32_t layers);

ChunkGeometry chunk_geometry(const ModelConfig& cfg);

/// Multiply-accumulates of the DCC conv cores for one chunk: M * K * P * E^2.
/// Normalizations and activations are excluded, matching the runtime counter.
uint64_t encoder_macs_per_chunk(const ModelConfig& cfg);

/// Hypothetical cost of a chunk attending to r_frames of history:
/// 2 * K * r_frames * D attention term plus 4 * K * D^2 for QKV/out
/// projections. Linear in r_frames, versus the encoder's log growth.
uint64_t attention_macs_per_chunk(const ModelConfig& cfg, uint64_t r_frames);

/// Parse a `key = value` per-line config file ('#' comments allowed).
/// Keys: L, E, D, K, M, P, N_c, heads, ffn_dim, embed_hidden, sample_rate.
/// All keys optional; unspecified fields keep their defaults.
ModelConfig load_config(const std::string& path);
ModelConfig parse_config(const std::string& text);

} // namespace waveformer
