#pragma once

#include "waveformer/audio.hpp"
#include "waveformer/checkpoint.hpp"
#include "waveformer/decoder.hpp"
#include "waveformer/encoder.hpp"

#include <memory>
#include <span>
#include <vector>

namespace waveformer {

struct FrontEndWeights {
    Tensor3 analysis_w;               // [E][1][3L]
    std::vector<float> analysis_b;    // [E]
    Tensor3 synthesis_w;              // [E][1][3L]
    std::vector<float> synthesis_b;   // [1]

    static FrontEndWeights from_set(const NamedTensorSet& set);
};

/// Checkpoint bound to typed weight structures. Immutable, shareable
/// between sessions.
struct ModelWeights {
    ModelConfig config;
    FrontEndWeights front;
    EncoderWeights encoder;
    DecoderWeights decoder;

    /// Validates the set first; throws ValidationError listing offenders.
    static ModelWeights bind(const NamedTensorSet& set);
};

/// One logical audio stream. Emits whole chunks of S = K*L samples; the
/// first chunk appears once S + 2L samples have been pushed, every S
/// samples after that. Step from one thread at a time.
class StreamSession {
public:
    StreamSession(std::shared_ptr<const ModelWeights> weights, const QueryVector& query);

    /// Buffers samples and returns whatever whole chunks became ready
    /// (possibly empty).
    std::vector<float> push(std::span<const float> samples);

    /// Overload with a sample-rate check against the config.
    std::vector<float> push(const AudioBuffer& buf);

    /// Zero-pads the lookahead, processes the final partial chunk and
    /// drains the synthesis tail. Total output length equals total input.
    std::vector<float> flush();

    uint64_t chunks_processed() const { return chunks_processed_; }
    const ModelConfig& config() const { return weights_->config; }

private:
    std::vector<float> process_ready(uint64_t ready_limit);
    void process_chunk(uint64_t k, std::vector<float>& out);
    float input_at(int64_t global_index) const;

    std::shared_ptr<const ModelWeights> weights_;
    QueryEmbedding query_;
    std::vector<DccLayerState> enc_states_;
    DecoderCache dec_cache_;
    std::vector<float> tail_;     // 2L-sample overlap-add carry
    std::vector<float> buffer_;   // raw input, buffer_[i] = sample buf_base_ + i
    uint64_t buf_base_ = 0;
    uint64_t total_in_ = 0;
    uint64_t total_out_ = 0;
    uint64_t chunks_processed_ = 0;
};

/// Single-pass causal reference: full-length causal convolutions, decoder
/// applied per chunk with the true previous chunk. The streaming session
/// produces the same output.
std::vector<float> offline_forward(const ModelWeights& weights,
                                   std::span<const float> signal,
                                   const QueryVector& query);

} // namespace waveformer
