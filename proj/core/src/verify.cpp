#include "waveformer/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace waveformer {

namespace {

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // uniform in [-0.5, 0.5)
    float sample() {
        return static_cast<float>(static_cast<double>(next() >> 11) * 0x1.0p-53 - 0.5);
    }
    uint64_t below(uint64_t n) { return next() % n; }
};

QueryVector default_query(const ModelConfig& cfg) {
    QueryVector q;
    q.bits.assign(cfg.num_classes, 0);
    q.bits[0] = 1;
    if (cfg.num_classes > 3) q.bits[3] = 1;
    return q;
}

std::vector<float> noise(Rng& rng, size_t n) {
    std::vector<float> x(n);
    for (auto& v : x) v = rng.sample();
    return x;
}

std::vector<float> run_stream(const ModelWeights& weights, const QueryVector& q,
                              std::span<const float> signal, bool flush = true) {
    auto shared = std::make_shared<const ModelWeights>(weights);
    StreamSession session(shared, q);
    std::vector<float> out = session.push(signal);
    if (flush) {
        auto rest = session.flush();
        out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
    double m = a.size() == b.size() ? 0.0 : 1e300;
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
    return m;
}

bool bitwise_equal(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

} // namespace

ProbeResult probe_stream_offline(const ModelWeights& weights, uint64_t seed,
                                 double seconds) {
    Rng rng(seed);
    const auto q = default_query(weights.config);
    const size_t n = static_cast<size_t>(seconds * weights.config.sample_rate);
    const auto signal = noise(rng, std::max<size_t>(n, 1));

    const auto streamed = run_stream(weights, q, signal);
    const auto offline = offline_forward(weights, signal, q);

    ProbeResult r;
    r.name = "stream_offline_equiv";
    r.max_diff = max_abs_diff(streamed, offline);
    r.pass = streamed.size() == offline.size() && r.max_diff < 1e-4;
    std::ostringstream d;
    d << "samples=" << signal.size() << " max_diff=" << r.max_diff;
    r.detail = d.str();
    return r;
}

ProbeResult probe_push_granularity(const ModelWeights& weights, uint64_t seed) {
    Rng rng(seed);
    const auto q = default_query(weights.config);
    const size_t n = 2 * weights.config.chunk_samples() +
                     weights.config.lookahead_samples() + 37;
    const auto signal = noise(rng, n);

    const auto whole = run_stream(weights, q, signal);

    auto shared = std::make_shared<const ModelWeights>(weights);
    StreamSession session(shared, q);
    std::vector<float> pieced;
    for (float v : signal) {
        auto out = session.push(std::span<const float>(&v, 1));
        pieced.insert(pieced.end(), out.begin(), out.end());
    }
    auto rest = session.flush();
    pieced.insert(pieced.end(), rest.begin(), rest.end());

    ProbeResult r;
    r.name = "push_granularity";
    r.pass = bitwise_equal(whole, pieced);
    r.max_diff = max_abs_diff(whole, pieced);
    r.detail = r.pass ? "bitwise identical" : "outputs differ";
    return r;
}

ProbeResult probe_chunk_causality(const ModelWeights& weights, uint64_t seed,
                                  int probes) {
    const ModelConfig& cfg = weights.config;
    const uint64_t S = cfg.chunk_samples();
    const uint64_t look = cfg.lookahead_samples();
    const auto q = default_query(cfg);

    Rng rng(seed);
    const size_t n = 5 * S + look;
    const auto signal = noise(rng, n);
    const auto base = run_stream(weights, q, signal, /*flush=*/false);

    ProbeResult r;
    r.name = "chunk_causality";
    r.pass = true;
    for (int p = 0; p < probes; ++p) {
        const uint64_t k = rng.below(4);
        const uint64_t horizon = (k + 1) * S + look;
        const uint64_t idx = horizon + rng.below(n - horizon);
        auto perturbed = signal;
        perturbed[idx] += 0.5f;
        const auto out = run_stream(weights, q, perturbed, /*flush=*/false);
        const size_t guard = static_cast<size_t>((k + 1) * S);
        if (out.size() < guard || base.size() < guard ||
            !bitwise_equal(std::span<const float>(base.data(), guard),
                           std::span<const float>(out.data(), guard))) {
            r.pass = false;
            std::ostringstream d;
            d << "probe " << p << " (chunk " << k << ", sample " << idx
              << ") changed already-emitted output";
            r.detail = d.str();
            break;
        }
    }
    if (r.pass) {
        std::ostringstream d;
        d << probes << " probes, emitted chunks bitwise stable";
        r.detail = d.str();
    }
    return r;
}

ProbeResult probe_decoder_window(const ModelWeights& weights, uint64_t seed) {
    const ModelConfig& cfg = weights.config;
    const int E = static_cast<int>(cfg.encoder_dim);
    const int K = static_cast<int>(cfg.chunk_frames);
    Rng rng(seed);

    QueryVector qv = default_query(cfg);
    const QueryEmbedding l = embed_query(qv, weights.decoder);

    std::vector<Tensor2> chunks;
    for (int k = 0; k < 4; ++k) {
        Tensor2 e(E, K);
        for (auto& v : e.data) v = rng.sample();
        chunks.push_back(std::move(e));
    }

    auto run = [&](const std::vector<Tensor2>& seq) {
        DecoderCache cache = make_decoder_cache(cfg);
        Tensor2 m;
        for (const auto& e : seq) m = decode_chunk(e, cache, l, weights.decoder, cfg);
        return m;
    };

    const Tensor2 base = run(chunks);

    auto perturbed = chunks;
    for (auto& v : perturbed[0].data) v += 1.0f;
    for (auto& v : perturbed[1].data) v -= 1.0f;
    const Tensor2 far = run(perturbed);

    auto near = chunks;
    near[2].at(0, 0) += 1.0f;
    const Tensor2 close = run(near);

    ProbeResult r;
    r.name = "decoder_window";
    const bool invariant = bitwise_equal(base.data, far.data);
    const bool sensitive = !bitwise_equal(base.data, close.data);
    r.pass = invariant && sensitive;
    r.max_diff = max_abs_diff(base.data, far.data);
    r.detail = invariant
                   ? (sensitive ? "m_k depends on e_k, e_{k-1} only"
                                : "m_k failed to react to e_{k-1}")
                   : "m_k leaked dependence on chunks older than k-1";
    return r;
}

std::pair<ProbeResult, ProbeResult> probe_receptive_field(uint32_t kernel,
                                                          uint32_t layers,
                                                          uint64_t seed) {
    ModelConfig cfg;
    cfg.encoder_dim = 64; // reduced width, geometry unchanged
    cfg.decoder_dim = 32;
    cfg.dcc_kernel = kernel;
    cfg.dcc_layers = layers;
    const uint64_t field = receptive_field_frames(kernel, layers);
    const uint32_t K = cfg.chunk_frames;
    const uint64_t chunk_count = field / K + 4;
    const uint64_t frames = chunk_count * K;

    const NamedTensorSet set = random_init(cfg, seed);
    const EncoderWeights enc = EncoderWeights::from_set(set);

    Rng rng(seed);
    Tensor2 latent(static_cast<int>(cfg.encoder_dim), static_cast<int>(frames));
    for (auto& v : latent.data) v = rng.sample();

    auto last_chunk = [&](const Tensor2& y) {
        auto states = make_encoder_state(cfg);
        Tensor2 e;
        for (uint64_t k = 0; k < chunk_count; ++k) {
            Tensor2 y_k(y.rows, static_cast<int>(K));
            for (int r = 0; r < y.rows; ++r)
                for (uint32_t t = 0; t < K; ++t)
                    y_k.at(r, static_cast<int>(t)) =
                        y.at(r, static_cast<int>(k * K + t));
            e = encode_chunk(y_k, states, enc);
        }
        return e;
    };

    const Tensor2 base = last_chunk(latent);

    auto perturb_frame = [&](uint64_t frame) {
        Tensor2 y = latent;
        for (int r = 0; r < y.rows; ++r) y.at(r, static_cast<int>(frame)) += 50.0f;
        return last_chunk(y);
    };

    // farthest frame outside the field w.r.t. every frame of the last chunk
    const uint64_t beyond = frames - K - field - 1;
    const Tensor2 far = perturb_frame(beyond);
    ProbeResult inv;
    inv.name = "receptive_field_invariance";
    inv.pass = bitwise_equal(base.data, far.data);
    inv.max_diff = max_abs_diff(base.data, far.data);
    {
        std::ostringstream d;
        d << "frame at distance " << (frames - K) - beyond << " > " << field
          << (inv.pass ? " left output bitwise unchanged" : " leaked into output");
        inv.detail = d.str();
    }

    // frame exactly `field` before the last output frame
    const uint64_t edge = frames - 1 - field;
    const Tensor2 close = perturb_frame(edge);
    ProbeResult sens;
    sens.name = "receptive_field_sensitivity";
    sens.pass = !bitwise_equal(base.data, close.data);
    sens.max_diff = max_abs_diff(base.data, close.data);
    {
        std::ostringstream d;
        d << "frame at distance " << field
          << (sens.pass ? " changed the output" : " had no visible effect");
        sens.detail = d.str();
    }
    return {inv, sens};
}

std::vector<ProbeResult> run_property_suite(const ModelWeights& weights, uint64_t seed,
                                            double seconds) {
    std::vector<ProbeResult> results;
    results.push_back(probe_stream_offline(weights, seed, seconds));
    results.push_back(probe_push_granularity(weights, seed));
    results.push_back(probe_chunk_causality(weights, seed, 5));
    results.push_back(probe_decoder_window(weights, seed));
    auto [inv, sens] = probe_receptive_field(weights.config.dcc_kernel,
                                             weights.config.dcc_layers, seed);
    results.push_back(inv);
    results.push_back(sens);
    return results;
}

} // namespace waveformer
