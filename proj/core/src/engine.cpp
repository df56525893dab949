#include "waveformer/engine.hpp"

#include "weight_bind.hpp"

#include <stdexcept>

namespace waveformer {

FrontEndWeights FrontEndWeights::from_set(const NamedTensorSet& set) {
    FrontEndWeights w;
    w.analysis_w = detail::bind3(set, "fe.conv.w");
    w.analysis_b = detail::bind1(set, "fe.conv.b");
    w.synthesis_w = detail::bind3(set, "syn.conv.w");
    w.synthesis_b = detail::bind1(set, "syn.conv.b");
    return w;
}

ModelWeights ModelWeights::bind(const NamedTensorSet& set) {
    validate_checkpoint(set);
    ModelWeights w;
    w.config = set.config;
    w.front = FrontEndWeights::from_set(set);
    w.encoder = EncoderWeights::from_set(set);
    w.decoder = DecoderWeights::from_set(set);
    return w;
}

namespace {

/// y_k from a materialized window of S + 2L raw samples. Frame i covers
/// window samples [iL, iL + 3L), i.e. global samples [kS + iL - L,
/// kS + iL + 2L).
Tensor2 analyze(const ModelWeights& w, const std::vector<float>& window) {
    Tensor2 in(1, static_cast<int>(window.size()));
    in.data = window;
    ConvSpec spec;
    spec.in_channels = 1;
    spec.out_channels = static_cast<int>(w.config.encoder_dim);
    spec.kernel_size = static_cast<int>(w.config.frontend_kernel());
    spec.stride = static_cast<int>(w.config.conv_stride);
    return conv1d(in, w.front.analysis_w, w.front.analysis_b, spec);
}

Tensor2 synthesize(const ModelWeights& w, const Tensor2& masked) {
    ConvSpec spec;
    spec.in_channels = static_cast<int>(w.config.encoder_dim);
    spec.out_channels = 1;
    spec.kernel_size = static_cast<int>(w.config.frontend_kernel());
    spec.stride = static_cast<int>(w.config.conv_stride);
    static const float zero_bias[1] = {0.0f};
    // synthesis bias is applied once per emitted sample by the caller
    return conv_transpose1d(masked, w.front.synthesis_w,
                            std::span<const float>(zero_bias, 1), spec);
}

QueryEmbedding checked_embedding(const ModelWeights& w, const QueryVector& q) {
    if (q.bits.size() != w.config.num_classes)
        throw std::invalid_argument("query length != configured class count");
    if (!q.any())
        throw std::invalid_argument("query must select at least one class");
    return embed_query(q, w.decoder);
}

} // namespace

StreamSession::StreamSession(std::shared_ptr<const ModelWeights> weights,
                             const QueryVector& query)
    : weights_(std::move(weights)),
      query_(checked_embedding(*weights_, query)),
      enc_states_(make_encoder_state(weights_->config)),
      dec_cache_(make_decoder_cache(weights_->config)),
      tail_(weights_->config.lookahead_samples(), 0.0f) {}

float StreamSession::input_at(int64_t g) const {
    if (g < 0 || g >= static_cast<int64_t>(total_in_)) return 0.0f;
    return buffer_[static_cast<size_t>(g - static_cast<int64_t>(buf_base_))];
}

void StreamSession::process_chunk(uint64_t k, std::vector<float>& out) {
    const ModelConfig& cfg = weights_->config;
    const int S = static_cast<int>(cfg.chunk_samples());
    const int L = static_cast<int>(cfg.conv_stride);
    const float bias = weights_->front.synthesis_b[0];

    std::vector<float> window(static_cast<size_t>(S + 2 * L));
    const int64_t start = static_cast<int64_t>(k) * S - L;
    for (int i = 0; i < S + 2 * L; ++i) window[i] = input_at(start + i);

    const Tensor2 y = analyze(*weights_, window);
    const Tensor2 e = encode_chunk(y, enc_states_, weights_->encoder);
    const Tensor2 m = decode_chunk(e, dec_cache_, query_, weights_->decoder, cfg);

    Tensor2 masked = y;
    for (size_t i = 0; i < masked.data.size(); ++i) masked.data[i] *= m.data[i];

    const Tensor2 synth = synthesize(*weights_, masked); // 1 x (S + 2L)
    const float* s = synth.row(0);
    for (int i = 0; i < S; ++i) {
        float v = s[i];
        if (i < 2 * L) v += tail_[i];
        out.push_back(v + bias);
    }
    for (int i = 0; i < 2 * L; ++i) tail_[i] = s[S + i];

    ++chunks_processed_;
    total_out_ += static_cast<uint64_t>(S);

    // drop raw samples no longer reachable by any future analysis window
    const int64_t keep_from = static_cast<int64_t>(chunks_processed_) * S - L;
    if (keep_from > static_cast<int64_t>(buf_base_)) {
        const size_t drop = static_cast<size_t>(keep_from - static_cast<int64_t>(buf_base_));
        if (drop >= buffer_.size()) {
            buf_base_ += buffer_.size();
            buffer_.clear();
        } else {
            buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(drop));
            buf_base_ += drop;
        }
    }
}

std::vector<float> StreamSession::process_ready(uint64_t ready_limit) {
    const ModelConfig& cfg = weights_->config;
    const uint64_t S = cfg.chunk_samples();
    const uint64_t look = cfg.lookahead_samples();
    std::vector<float> out;
    while (chunks_processed_ < ready_limit &&
           total_in_ >= (chunks_processed_ + 1) * S + look)
        process_chunk(chunks_processed_, out);
    return out;
}

std::vector<float> StreamSession::push(std::span<const float> samples) {
    buffer_.insert(buffer_.end(), samples.begin(), samples.end());
    total_in_ += samples.size();
    return process_ready(UINT64_MAX);
}

std::vector<float> StreamSession::push(const AudioBuffer& buf) {
    if (buf.sample_rate != weights_->config.sample_rate)
        throw std::invalid_argument("sample rate mismatch: stream expects " +
                                    std::to_string(weights_->config.sample_rate) + " Hz");
    return push(std::span<const float>(buf.samples));
}

std::vector<float> StreamSession::flush() {
    const uint64_t S = weights_->config.chunk_samples();
    const uint64_t total_chunks = (total_in_ + S - 1) / S;
    std::vector<float> out;
    while (chunks_processed_ < total_chunks)
        process_chunk(chunks_processed_, out);
    if (total_out_ > total_in_) {
        const uint64_t excess = total_out_ - total_in_;
        out.resize(out.size() - static_cast<size_t>(excess));
        total_out_ = total_in_;
    }
    return out;
}

std::vector<float> offline_forward(const ModelWeights& weights,
                                   std::span<const float> signal,
                                   const QueryVector& query) {
    const ModelConfig& cfg = weights.config;
    const QueryEmbedding l = checked_embedding(weights, query);
    const uint64_t T = signal.size();
    const uint64_t S = cfg.chunk_samples();
    const uint32_t K = cfg.chunk_frames;
    const uint32_t L = cfg.conv_stride;
    if (T == 0) return {};
    const uint64_t chunks = (T + S - 1) / S;

    // full-length analysis: frame i covers samples [iL - L, iL + 2L)
    Tensor2 in(1, static_cast<int>(T));
    std::copy(signal.begin(), signal.end(), in.data.begin());
    ConvSpec spec;
    spec.in_channels = 1;
    spec.out_channels = static_cast<int>(cfg.encoder_dim);
    spec.kernel_size = static_cast<int>(cfg.frontend_kernel());
    spec.stride = static_cast<int>(L);
    const int right_pad = static_cast<int>(chunks * S + 2 * L - L - T);
    const Tensor2 y_full = conv1d(in, weights.front.analysis_w, weights.front.analysis_b,
                                  spec, static_cast<int>(L), right_pad);

    const Tensor2 e_full = encode_offline(y_full, weights.encoder);

    DecoderCache cache = make_decoder_cache(cfg);
    std::vector<float> acc(chunks * S + 2 * L, 0.0f);
    for (uint64_t k = 0; k < chunks; ++k) {
        Tensor2 y_k(y_full.rows, static_cast<int>(K));
        Tensor2 e_k(e_full.rows, static_cast<int>(K));
        for (int r = 0; r < y_full.rows; ++r)
            for (uint32_t t = 0; t < K; ++t) {
                y_k.at(r, static_cast<int>(t)) =
                    y_full.at(r, static_cast<int>(k * K + t));
                e_k.at(r, static_cast<int>(t)) =
                    e_full.at(r, static_cast<int>(k * K + t));
            }
        const Tensor2 m = decode_chunk(e_k, cache, l, weights.decoder, cfg);
        Tensor2 masked = y_k;
        for (size_t i = 0; i < masked.data.size(); ++i) masked.data[i] *= m.data[i];
        ConvSpec syn_spec = spec;
        syn_spec.in_channels = static_cast<int>(cfg.encoder_dim);
        syn_spec.out_channels = 1;
        static const float zero_bias[1] = {0.0f};
        const Tensor2 synth = conv_transpose1d(masked, weights.front.synthesis_w,
                                               std::span<const float>(zero_bias, 1),
                                               syn_spec);
        const float* s = synth.row(0);
        for (uint64_t i = 0; i < S + 2 * L; ++i) acc[k * S + i] += s[i];
    }

    const float bias = weights.front.synthesis_b[0];
    std::vector<float> out(T);
    for (uint64_t i = 0; i < T; ++i) out[i] = acc[i] + bias;
    return out;
}

} // namespace waveformer
