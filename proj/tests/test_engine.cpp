#include "waveformer/engine.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

using namespace waveformer;

namespace {

// Default geometry (L=32, K=13), narrow channels so the tests stay fast.
std::shared_ptr<const ModelWeights> small_model(uint64_t seed = 100) {
    ModelConfig cfg;
    cfg.encoder_dim = 16;
    cfg.decoder_dim = 8;
    cfg.heads = 2;
    cfg.ffn_dim = 32;
    cfg.embed_hidden = 12;
    cfg.dcc_layers = 4;
    return std::make_shared<ModelWeights>(ModelWeights::bind(random_init(cfg, seed)));
}

QueryVector one_hot(uint32_t num_classes, size_t idx) {
    QueryVector q{std::vector<uint8_t>(num_classes, 0)};
    q.bits[idx] = 1;
    return q;
}

std::vector<float> noise(oracle::Rng& rng, size_t n) {
    std::vector<float> v(n);
    for (auto& x : v) x = rng.uniform(-0.5f, 0.5f);
    return v;
}

} // namespace

TEST_CASE("nothing is emitted until the chunk plus lookahead is buffered") {
    auto model = small_model();
    const auto& cfg = model->config;
    const uint32_t S = cfg.chunk_samples();
    const uint32_t A = cfg.lookahead_samples();
    REQUIRE(S == 416);
    REQUIRE(A == 64);

    StreamSession session(model, one_hot(cfg.num_classes, 0));
    oracle::Rng rng(1);
    const auto in = noise(rng, S + A);

    auto out = session.push(std::span<const float>(in.data(), S));
    CHECK(out.empty());
    out = session.push(std::span<const float>(in.data() + S, A - 1));
    CHECK(out.empty());
    out = session.push(std::span<const float>(in.data() + S + A - 1, 1));
    CHECK(out.size() == S);
    CHECK(session.chunks_processed() == 1);
}

TEST_CASE("first emission happens at exactly 480 samples") {
    auto model = small_model();
    StreamSession session(model, one_hot(model->config.num_classes, 1));
    oracle::Rng rng(2);
    size_t pushed = 0;
    size_t first_emit = 0;
    while (first_emit == 0 && pushed < 1000) {
        const float s = rng.uniform();
        const auto out = session.push(std::span<const float>(&s, 1));
        ++pushed;
        if (!out.empty()) first_emit = pushed;
    }
    CHECK(first_emit == 480);
}

TEST_CASE("output is independent of push granularity") {
    auto model = small_model();
    const auto q = one_hot(model->config.num_classes, 2);
    oracle::Rng rng(3);
    const auto in = noise(rng, 3 * 416 + 91);

    StreamSession whole(model, q);
    std::vector<float> a = whole.push(std::span<const float>(in));
    for (float v : whole.flush()) a.push_back(v);

    StreamSession piecewise(model, q);
    std::vector<float> b;
    for (float s : in)
        for (float v : piecewise.push(std::span<const float>(&s, 1))) b.push_back(v);
    for (float v : piecewise.flush()) b.push_back(v);

    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("flush pads with zeros and matches the input length") {
    auto model = small_model();
    StreamSession session(model, one_hot(model->config.num_classes, 0));
    oracle::Rng rng(4);
    const auto in = noise(rng, 1000);
    std::vector<float> out = session.push(std::span<const float>(in));
    for (float v : session.flush()) out.push_back(v);
    CHECK(out.size() == in.size());
    for (float v : out) CHECK(std::isfinite(v));
}

TEST_CASE("streaming equals the offline reference") {
    auto model = small_model(7);
    const auto q = one_hot(model->config.num_classes, 3);
    oracle::Rng rng(5);
    const auto in = noise(rng, 6 * 416 + 200);

    StreamSession session(model, q);
    std::vector<float> streamed = session.push(std::span<const float>(in));
    for (float v : session.flush()) streamed.push_back(v);

    const std::vector<float> offline = offline_forward(*model, in, q);
    REQUIRE(streamed.size() == offline.size());
    double max_diff = 0.0;
    for (size_t i = 0; i < streamed.size(); ++i)
        max_diff = std::max(max_diff, std::abs(double(streamed[i]) - offline[i]));
    CHECK(max_diff < 1e-4);
}

TEST_CASE("emitted samples never depend on input beyond the lookahead") {
    auto model = small_model(8);
    const auto q = one_hot(model->config.num_classes, 1);
    const uint32_t S = model->config.chunk_samples();
    const uint32_t A = model->config.lookahead_samples();

    oracle::Rng rng(6);
    auto in = noise(rng, 5 * S + A);
    const std::vector<float> base = offline_forward(*model, in, q);

    for (uint64_t k : {1u, 3u}) {
        auto perturbed = in;
        for (size_t i = (k + 1) * S + A; i < perturbed.size(); ++i) perturbed[i] += 0.3f;
        const std::vector<float> out = offline_forward(*model, perturbed, q);
        for (size_t i = 0; i < (k + 1) * S; ++i) CHECK(out[i] == base[i]);
    }
}

TEST_CASE("a silent stream stays silent through the front end bias path") {
    auto model = small_model(9);
    StreamSession session(model, one_hot(model->config.num_classes, 0));
    const std::vector<float> zeros(2 * 416 + 64, 0.0f);
    std::vector<float> out = session.push(std::span<const float>(zeros));
    for (float v : session.flush()) out.push_back(v);
    CHECK(out.size() == zeros.size());
    // zero input with nonzero biases still gives a deterministic constant-ish
    // output; the contract here is only finiteness and length
    for (float v : out) CHECK(std::isfinite(v));
}

TEST_CASE("audio-buffer push checks the sample rate") {
    auto model = small_model();
    StreamSession session(model, one_hot(model->config.num_classes, 0));
    AudioBuffer wrong;
    wrong.samples.assign(100, 0.0f);
    wrong.sample_rate = 16000;
    CHECK_THROWS_AS(session.push(wrong), std::invalid_argument);
}

TEST_CASE("an all-zero query is rejected") {
    auto model = small_model();
    QueryVector q{std::vector<uint8_t>(model->config.num_classes, 0)};
    CHECK_THROWS_AS(StreamSession(model, q), std::invalid_argument);
}
