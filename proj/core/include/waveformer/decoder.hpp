#pragma once

#include "waveformer/checkpoint.hpp"
#include "waveformer/config.hpp"
#include "waveformer/tensor.hpp"

#include <cstdint>
#include <vector>

namespace waveformer {

/// One-hot or multi-hot class selector over num_classes entries.
struct QueryVector {
    std::vector<uint8_t> bits;

    bool any() const {
        for (auto b : bits)
            if (b) return true;
        return false;
    }
};

struct QueryEmbedding {
    std::vector<float> values; // length E
};

struct AttentionBlockWeights {
    Tensor2 wq, wk, wv, wo;              // [D][D]
    std::vector<float> bq, bk, bv, bo;   // [D]
};

struct DecoderWeights {
    // query embedding MLP: N_c -> hidden -> hidden -> E, ReLU between
    Tensor2 emb_fc1, emb_fc2, emb_fc3;
    std::vector<float> emb_b1, emb_b2, emb_b3;
    // 1x1 projections E -> D (self path takes the conditioned stream)
    Tensor2 proj_self_w, proj_cross_w;
    std::vector<float> proj_self_b, proj_cross_b;
    // single pre-norm transformer decoder layer
    AttentionBlockWeights self_attn, cross_attn;
    std::vector<float> norm1_g, norm1_b, norm2_g, norm2_b, norm3_g, norm3_b;
    Tensor2 ffn_w1, ffn_w2;
    std::vector<float> ffn_b1, ffn_b2;
    // 1x1 projection D -> E
    Tensor2 proj_out_w;
    std::vector<float> proj_out_b;

    static DecoderWeights from_set(const NamedTensorSet& set);
};

/// Projected representations of the previous chunk, zeros before the first
/// chunk. Caching the projected forms avoids recomputing the 1x1 convs.
struct DecoderCache {
    Tensor2 pe_prev;  // D x K, unconditioned path
    Tensor2 pep_prev; // D x K, conditioned path
};

DecoderCache make_decoder_cache(const ModelConfig& cfg);

QueryEmbedding embed_query(const QueryVector& q, const DecoderWeights& w);

/// One chunk of mask generation. Conditions e_k with the query embedding,
/// runs the transformer decoder layer over the 2-chunk window (previous +
/// current), projects back and applies the skip connection. Updates the
/// cache to the current chunk.
Tensor2 decode_chunk(const Tensor2& e_k, DecoderCache& cache, const QueryEmbedding& l,
                     const DecoderWeights& w, const ModelConfig& cfg);

} // namespace waveformer
