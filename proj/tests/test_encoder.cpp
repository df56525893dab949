#include "waveformer/encoder.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace waveformer;

namespace {

ModelConfig tiny_config(uint32_t layers = 3) {
    ModelConfig cfg;
    cfg.encoder_dim = 8;
    cfg.decoder_dim = 4;
    cfg.heads = 2;
    cfg.ffn_dim = 16;
    cfg.embed_hidden = 8;
    cfg.dcc_layers = layers;
    return cfg;
}

Tensor2 random_latent(oracle::Rng& rng, const ModelConfig& cfg, int frames) {
    return oracle::random_tensor(rng, static_cast<int>(cfg.encoder_dim), frames);
}

Tensor2 slice_cols(const Tensor2& t, int c0, int c1) {
    Tensor2 out(t.rows, c1 - c0);
    for (int r = 0; r < t.rows; ++r)
        for (int c = c0; c < c1; ++c) out.at(r, c - c0) = t.at(r, c);
    return out;
}

} // namespace

TEST_CASE("zero weights pass the chunk through the residual path") {
    const ModelConfig cfg = tiny_config();
    const int E = static_cast<int>(cfg.encoder_dim);
    DccLayerWeights w;
    w.conv_w = Tensor3(E, E, 3);
    w.conv_b.assign(static_cast<size_t>(E), 0.0f);
    w.norm_g.assign(static_cast<size_t>(E), 0.0f);
    w.norm_b.assign(static_cast<size_t>(E), 0.0f);
    w.dilation = 4;
    DccLayerState state{Tensor2(E, 8)};

    oracle::Rng rng(1);
    const Tensor2 in = random_latent(rng, cfg, 13);
    const Tensor2 out = dcc_layer_step(in, state, w);
    REQUIRE(out.same_shape(in));
    for (size_t i = 0; i < in.data.size(); ++i) CHECK(out.data[i] == in.data[i]);
}

TEST_CASE("context update keeps the rightmost padded-input frames") {
    const ModelConfig cfg = tiny_config();
    const NamedTensorSet set = random_init(cfg, 4);
    const EncoderWeights enc = EncoderWeights::from_set(set);
    auto states = make_encoder_state(cfg);

    oracle::Rng rng(2);
    const Tensor2 chunk1 = random_latent(rng, cfg, 13);

    // layer 0 context after one step == last 2 frames of chunk1 (zero old context)
    DccLayerState s0 = states[0];
    const Tensor2 old_context = s0.context;
    const Tensor2 padded = concat_cols(old_context, chunk1);
    dcc_layer_step(chunk1, s0, enc.layers[0]);
    const int width = s0.context.cols;
    CHECK(width == 2 * static_cast<int>(enc.layers[0].dilation));
    for (int r = 0; r < s0.context.rows; ++r)
        for (int c = 0; c < width; ++c)
            CHECK(s0.context.at(r, c) == padded.at(r, padded.cols - width + c));
}

TEST_CASE("state width is conserved across steps") {
    const ModelConfig cfg = tiny_config(4);
    const NamedTensorSet set = random_init(cfg, 6);
    const EncoderWeights enc = EncoderWeights::from_set(set);
    auto states = make_encoder_state(cfg);
    oracle::Rng rng(3);
    for (int k = 0; k < 5; ++k) {
        encode_chunk(random_latent(rng, cfg, 13), states, enc);
        for (size_t i = 0; i < states.size(); ++i)
            CHECK(states[i].context.cols ==
                  static_cast<int>((cfg.dcc_kernel - 1) * (1u << i)));
    }
}

TEST_CASE("two streamed chunks equal one full-sequence causal pass") {
    const ModelConfig cfg = tiny_config(3);
    const NamedTensorSet set = random_init(cfg, 11);
    const EncoderWeights enc = EncoderWeights::from_set(set);

    oracle::Rng rng(12);
    const int K = static_cast<int>(cfg.chunk_frames);
    const Tensor2 both = random_latent(rng, cfg, 2 * K);

    auto states = make_encoder_state(cfg);
    const Tensor2 out1 = encode_chunk(slice_cols(both, 0, K), states, enc);
    const Tensor2 out2 = encode_chunk(slice_cols(both, K, 2 * K), states, enc);

    const Tensor2 offline = encode_offline(both, enc);
    for (int r = 0; r < both.rows; ++r)
        for (int c = 0; c < K; ++c) {
            CHECK(std::abs(out1.at(r, c) - offline.at(r, c)) < 1e-5);
            CHECK(std::abs(out2.at(r, c) - offline.at(r, c + K)) < 1e-5);
        }
}

TEST_CASE("zero input with zero-bias weights encodes to zero") {
    const ModelConfig cfg = tiny_config();
    NamedTensorSet set = random_init(cfg, 13);
    for (uint32_t i = 0; i < cfg.dcc_layers; ++i) {
        const std::string p = "enc.layer" + std::to_string(i) + ".";
        for (auto& v : set.entries.at(p + "conv.b").data) v = 0.0f;
        for (auto& v : set.entries.at(p + "norm.b").data) v = 0.0f;
    }
    const EncoderWeights enc = EncoderWeights::from_set(set);
    auto states = make_encoder_state(cfg);
    const Tensor2 out =
        encode_chunk(Tensor2(static_cast<int>(cfg.encoder_dim), 13), states, enc);
    for (float v : out.data) CHECK(v == 0.0f);
}

TEST_CASE("streaming over 8 chunks equals the offline encoder") {
    const ModelConfig cfg = tiny_config(5);
    const NamedTensorSet set = random_init(cfg, 21);
    const EncoderWeights enc = EncoderWeights::from_set(set);

    oracle::Rng rng(22);
    const int K = static_cast<int>(cfg.chunk_frames);
    const Tensor2 full = random_latent(rng, cfg, 8 * K);
    const Tensor2 offline = encode_offline(full, enc);

    auto states = make_encoder_state(cfg);
    for (int k = 0; k < 8; ++k) {
        const Tensor2 out = encode_chunk(slice_cols(full, k * K, (k + 1) * K), states, enc);
        double max_diff = 0.0;
        for (int r = 0; r < full.rows; ++r)
            for (int c = 0; c < K; ++c)
                max_diff = std::max(max_diff,
                                    std::abs(double(out.at(r, c)) -
                                             offline.at(r, k * K + c)));
        CHECK(max_diff < 1e-4);
    }
}

TEST_CASE("causality: a perturbed frame never leaks backwards") {
    const ModelConfig cfg = tiny_config(3);
    const NamedTensorSet set = random_init(cfg, 31);
    const EncoderWeights enc = EncoderWeights::from_set(set);

    oracle::Rng rng(32);
    const int frames = 3 * static_cast<int>(cfg.chunk_frames);
    const Tensor2 base_in = random_latent(rng, cfg, frames);
    const Tensor2 base_out = encode_offline(base_in, enc);

    for (int probe : {5, 17, 30}) {
        Tensor2 in = base_in;
        for (int r = 0; r < in.rows; ++r) in.at(r, probe) += 1.0f;
        const Tensor2 out = encode_offline(in, enc);
        for (int r = 0; r < out.rows; ++r)
            for (int c = 0; c < probe; ++c)
                CHECK(out.at(r, c) == base_out.at(r, c));
    }
}

TEST_CASE("shape errors are rejected") {
    const ModelConfig cfg = tiny_config();
    const NamedTensorSet set = random_init(cfg, 41);
    const EncoderWeights enc = EncoderWeights::from_set(set);
    auto states = make_encoder_state(cfg);

    Tensor2 wrong_rows(static_cast<int>(cfg.encoder_dim) + 1, 13);
    CHECK_THROWS_AS(encode_chunk(wrong_rows, states, enc), std::invalid_argument);

    auto short_states = make_encoder_state(cfg);
    short_states.pop_back();
    Tensor2 ok(static_cast<int>(cfg.encoder_dim), 13);
    CHECK_THROWS_AS(encode_chunk(ok, short_states, enc), std::invalid_argument);
}
