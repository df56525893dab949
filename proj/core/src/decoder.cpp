#include "waveformer/decoder.hpp"

#include "weight_bind.hpp"

#include <stdexcept>

namespace waveformer {

namespace {

Tensor2 multihead(const AttentionBlockWeights& w, const Tensor2& q_in,
                  const Tensor2& kv_in, int heads) {
    const Tensor2 q = linear(q_in, w.wq, w.bq);
    const Tensor2 k = linear(kv_in, w.wk, w.bk);
    const Tensor2 v = linear(kv_in, w.wv, w.bv);
    return linear(attention(q, k, v, heads), w.wo, w.bo);
}

void add_inplace(Tensor2& a, const Tensor2& b) {
    for (size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

} // namespace

DecoderWeights DecoderWeights::from_set(const NamedTensorSet& set) {
    DecoderWeights w;
    w.emb_fc1 = detail::bind2(set, "emb.fc1.w");
    w.emb_b1 = detail::bind1(set, "emb.fc1.b");
    w.emb_fc2 = detail::bind2(set, "emb.fc2.w");
    w.emb_b2 = detail::bind1(set, "emb.fc2.b");
    w.emb_fc3 = detail::bind2(set, "emb.fc3.w");
    w.emb_b3 = detail::bind1(set, "emb.fc3.b");
    w.proj_self_w = detail::bind2(set, "dec.proj_self.w");
    w.proj_self_b = detail::bind1(set, "dec.proj_self.b");
    w.proj_cross_w = detail::bind2(set, "dec.proj_cross.w");
    w.proj_cross_b = detail::bind1(set, "dec.proj_cross.b");
    auto attn = [&set](const std::string& blk) {
        AttentionBlockWeights a;
        const std::string p = "dec.xform." + blk + ".";
        a.wq = detail::bind2(set, p + "wq");
        a.wk = detail::bind2(set, p + "wk");
        a.wv = detail::bind2(set, p + "wv");
        a.wo = detail::bind2(set, p + "wo");
        a.bq = detail::bind1(set, p + "bq");
        a.bk = detail::bind1(set, p + "bk");
        a.bv = detail::bind1(set, p + "bv");
        a.bo = detail::bind1(set, p + "bo");
        return a;
    };
    w.self_attn = attn("self");
    w.cross_attn = attn("cross");
    w.norm1_g = detail::bind1(set, "dec.xform.norm1.g");
    w.norm1_b = detail::bind1(set, "dec.xform.norm1.b");
    w.norm2_g = detail::bind1(set, "dec.xform.norm2.g");
    w.norm2_b = detail::bind1(set, "dec.xform.norm2.b");
    w.norm3_g = detail::bind1(set, "dec.xform.norm3.g");
    w.norm3_b = detail::bind1(set, "dec.xform.norm3.b");
    w.ffn_w1 = detail::bind2(set, "dec.xform.ffn.fc1.w");
    w.ffn_b1 = detail::bind1(set, "dec.xform.ffn.fc1.b");
    w.ffn_w2 = detail::bind2(set, "dec.xform.ffn.fc2.w");
    w.ffn_b2 = detail::bind1(set, "dec.xform.ffn.fc2.b");
    w.proj_out_w = detail::bind2(set, "dec.proj_out.w");
    w.proj_out_b = detail::bind1(set, "dec.proj_out.b");
    return w;
}

DecoderCache make_decoder_cache(const ModelConfig& cfg) {
    DecoderCache c;
    c.pe_prev = Tensor2(static_cast<int>(cfg.decoder_dim),
                        static_cast<int>(cfg.chunk_frames));
    c.pep_prev = c.pe_prev;
    return c;
}

QueryEmbedding embed_query(const QueryVector& q, const DecoderWeights& w) {
    if (static_cast<int>(q.bits.size()) != w.emb_fc1.cols)
        throw std::invalid_argument("embed_query: query length != class count");

    Tensor2 x(static_cast<int>(q.bits.size()), 1);
    for (size_t i = 0; i < q.bits.size(); ++i)
        x.at(static_cast<int>(i), 0) = q.bits[i] ? 1.0f : 0.0f;

    const Tensor2 h1 = relu(linear(x, w.emb_fc1, w.emb_b1));
    const Tensor2 h2 = relu(linear(h1, w.emb_fc2, w.emb_b2));
    const Tensor2 out = linear(h2, w.emb_fc3, w.emb_b3);

    QueryEmbedding l;
    l.values = out.data;
    return l;
}

Tensor2 decode_chunk(const Tensor2& e_k, DecoderCache& cache, const QueryEmbedding& l,
                     const DecoderWeights& w, const ModelConfig& cfg) {
    const int E = static_cast<int>(cfg.encoder_dim);
    const int K = static_cast<int>(cfg.chunk_frames);
    const int heads = static_cast<int>(cfg.heads);
    if (e_k.rows != E || e_k.cols != K)
        throw std::invalid_argument("decode_chunk: encoded chunk shape mismatch");
    if (static_cast<int>(l.values.size()) != E)
        throw std::invalid_argument("decode_chunk: query embedding length mismatch");

    // multiplicative query integration, broadcast over frames
    Tensor2 e_cond = e_k;
    for (int r = 0; r < E; ++r) {
        float* row = e_cond.row(r);
        for (int t = 0; t < K; ++t) row[t] *= l.values[r];
    }

    const Tensor2 pe = relu(linear(e_k, w.proj_cross_w, w.proj_cross_b));
    const Tensor2 pep = relu(linear(e_cond, w.proj_self_w, w.proj_self_b));

    // self-attention over [previous chunk, current chunk]
    const Tensor2 self_window = concat_cols(cache.pep_prev, pep);
    Tensor2 h = pep;
    add_inplace(h, multihead(w.self_attn, layer_norm(pep, w.norm1_g, w.norm1_b),
                             layer_norm(self_window, w.norm1_g, w.norm1_b), heads));

    // cross-attention against the unconditioned window
    const Tensor2 cross_window = concat_cols(cache.pe_prev, pe);
    add_inplace(h, multihead(w.cross_attn, layer_norm(h, w.norm2_g, w.norm2_b),
                             cross_window, heads));

    // feed-forward
    add_inplace(h, linear(relu(linear(layer_norm(h, w.norm3_g, w.norm3_b), w.ffn_w1,
                                      w.ffn_b1)),
                          w.ffn_w2, w.ffn_b2));

    // project back and apply the skip from the conditioned representation
    Tensor2 mask = relu(linear(h, w.proj_out_w, w.proj_out_b));
    add_inplace(mask, e_cond);

    cache.pe_prev = pe;
    cache.pep_prev = pep;
    return mask;
}

} // namespace waveformer
