#pragma once

#include "waveformer/checkpoint.hpp"
#include "waveformer/config.hpp"
#include "waveformer/tensor.hpp"

#include <vector>

namespace waveformer {

/// One dilated causal conv layer: pre-norm, conv E->E with ReLU, residual add.
struct DccLayerWeights {
    Tensor3 conv_w;              // [E][E][P]
    std::vector<float> conv_b;   // [E]
    std::vector<float> norm_g;   // [E]
    std::vector<float> norm_b;   // [E]
    uint32_t dilation = 1;
};

struct EncoderWeights {
    std::vector<DccLayerWeights> layers; // dilation of layer i is 2^i

    static EncoderWeights from_set(const NamedTensorSet& set);
};

/// Retained left context for one layer: the rightmost (P-1)*dilation frames
/// of the previous padded input, zeros at session start.
struct DccLayerState {
    Tensor2 context; // E x (P-1)*dilation
};

std::vector<DccLayerState> make_encoder_state(const ModelConfig& cfg);

/// One layer, one chunk. Consumes K input frames, produces K output frames,
/// updates the layer's context in place.
Tensor2 dcc_layer_step(const Tensor2& in_chunk, DccLayerState& state,
                       const DccLayerWeights& w);

/// Full stack over one chunk.
Tensor2 encode_chunk(const Tensor2& y_k, std::vector<DccLayerState>& states,
                     const EncoderWeights& w);

/// Full-sequence causal stack: same computation with explicit left
/// zero-padding instead of carried context. Streaming over chunks of the
/// same sequence produces identical output.
Tensor2 encode_offline(const Tensor2& y, const EncoderWeights& w);

} // namespace waveformer
