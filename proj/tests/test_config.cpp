#include "waveformer/config.hpp"

#include "waveformer/checkpoint.hpp"
#include "waveformer/encoder.hpp"
#include "waveformer/tensor.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace waveformer;

TEST_CASE("receptive field formula") {
    CHECK(receptive_field_frames(3, 10) == 2046);
    CHECK(receptive_field_frames(3, 1) == 2);
    CHECK(receptive_field_frames(2, 4) == 15);
    CHECK_THROWS_AS(receptive_field_frames(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(receptive_field_frames(3, 0), std::invalid_argument);
}

TEST_CASE("receptive field is strictly increasing in kernel and depth") {
    for (uint32_t p = 2; p < 6; ++p)
        for (uint32_t m = 1; m < 16; ++m) {
            CHECK(receptive_field_frames(p + 1, m) > receptive_field_frames(p, m));
            CHECK(receptive_field_frames(p, m + 1) > receptive_field_frames(p, m));
        }
}

TEST_CASE("default chunk geometry") {
    const ModelConfig cfg;
    const ChunkGeometry g = chunk_geometry(cfg);
    CHECK(g.samples_per_chunk == 416);
    CHECK(g.chunk_duration_ms == doctest::Approx(9.43).epsilon(0.001));
    CHECK(g.lookahead_samples == 64);
    CHECK(g.lookahead_ms == doctest::Approx(1.45).epsilon(0.01));
    CHECK(g.receptive_field_seconds == doctest::Approx(1.485).epsilon(0.01));
    CHECK(g.samples_per_chunk / cfg.conv_stride == cfg.chunk_frames);
}

TEST_CASE("encoder MAC formula grows linearly while field grows exponentially") {
    ModelConfig cfg;
    uint64_t prev_macs = 0;
    for (uint32_t m = 1; m <= 16; ++m) {
        cfg.dcc_layers = m;
        const uint64_t macs = encoder_macs_per_chunk(cfg);
        if (m > 1) {
            // one extra layer costs exactly one layer's constant term
            const uint64_t layer_cost = static_cast<uint64_t>(cfg.chunk_frames) *
                                        cfg.dcc_kernel * cfg.encoder_dim *
                                        cfg.encoder_dim;
            CHECK(macs - prev_macs == layer_cost);
            // receptive field roughly doubles
            const uint64_t r0 = receptive_field_frames(cfg.dcc_kernel, m - 1);
            const uint64_t r1 = receptive_field_frames(cfg.dcc_kernel, m);
            CHECK(r1 > 2 * r0);
            CHECK(r1 <= 2 * r0 + 2);
        }
        prev_macs = macs;
    }
}

TEST_CASE("attention MAC term is linear in the receptive field") {
    const ModelConfig cfg;
    const uint64_t proj = attention_macs_per_chunk(cfg, 0);
    const uint64_t a1 = attention_macs_per_chunk(cfg, 1000) - proj;
    const uint64_t a2 = attention_macs_per_chunk(cfg, 2000) - proj;
    CHECK(a2 == 2 * a1);
}

TEST_CASE("instrumented encoder matches the closed-form MAC count") {
    ModelConfig cfg;
    cfg.encoder_dim = 32; // smaller dims, same formula
    cfg.decoder_dim = 16;
    const NamedTensorSet set = random_init(cfg, 5);
    const EncoderWeights enc = EncoderWeights::from_set(set);
    auto states = make_encoder_state(cfg);
    Tensor2 y(static_cast<int>(cfg.encoder_dim), static_cast<int>(cfg.chunk_frames));
    for (size_t i = 0; i < y.data.size(); ++i) y.data[i] = static_cast<float>(i % 7) - 3.0f;
    mac_reset();
    encode_chunk(y, states, enc);
    CHECK(mac_count() == encoder_macs_per_chunk(cfg));
}

TEST_CASE("config file parsing") {
    const ModelConfig cfg = parse_config("E = 256\nD=128\n# comment\nK = 13\n");
    CHECK(cfg.encoder_dim == 256);
    CHECK(cfg.decoder_dim == 128);
    CHECK(cfg.chunk_frames == 13);
    CHECK(cfg.ffn_dim == 4 * 128); // tracks D when unspecified
    CHECK(cfg.conv_stride == 32);

    CHECK_THROWS_AS(parse_config("bogus_key = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("E 256\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("D = 1024\n"), std::invalid_argument); // D > E
}

TEST_CASE("config validation") {
    ModelConfig cfg;
    cfg.decoder_dim = 513;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ModelConfig{};
    cfg.heads = 7; // 256 % 7 != 0
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ModelConfig{};
    cfg.dcc_kernel = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
