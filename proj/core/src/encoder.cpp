#include "waveformer/encoder.hpp"

#include "weight_bind.hpp"

#include <stdexcept>

namespace waveformer {

EncoderWeights EncoderWeights::from_set(const NamedTensorSet& set) {
    EncoderWeights w;
    w.layers.reserve(set.config.dcc_layers);
    for (uint32_t i = 0; i < set.config.dcc_layers; ++i) {
        const std::string p = "enc.layer" + std::to_string(i) + ".";
        DccLayerWeights layer;
        layer.conv_w = detail::bind3(set, p + "conv.w");
        layer.conv_b = detail::bind1(set, p + "conv.b");
        layer.norm_g = detail::bind1(set, p + "norm.g");
        layer.norm_b = detail::bind1(set, p + "norm.b");
        layer.dilation = 1u << i;
        w.layers.push_back(std::move(layer));
    }
    return w;
}

std::vector<DccLayerState> make_encoder_state(const ModelConfig& cfg) {
    std::vector<DccLayerState> states(cfg.dcc_layers);
    for (uint32_t i = 0; i < cfg.dcc_layers; ++i) {
        const int width = static_cast<int>((cfg.dcc_kernel - 1) * (1u << i));
        states[i].context = Tensor2(static_cast<int>(cfg.encoder_dim), width);
    }
    return states;
}

Tensor2 dcc_layer_step(const Tensor2& in_chunk, DccLayerState& state,
                       const DccLayerWeights& w) {
    const int channels = w.conv_w.d0;
    const int kernel = w.conv_w.d2;
    const int ctx_width = static_cast<int>((kernel - 1) * w.dilation);
    if (in_chunk.rows != channels)
        throw std::invalid_argument("dcc_layer_step: chunk channel count mismatch");
    if (state.context.rows != channels || state.context.cols != ctx_width)
        throw std::invalid_argument("dcc_layer_step: context shape mismatch");

    const Tensor2 padded = concat_cols(state.context, in_chunk);

    ConvSpec spec;
    spec.in_channels = channels;
    spec.out_channels = channels;
    spec.kernel_size = kernel;
    spec.stride = 1;
    spec.dilation = static_cast<int>(w.dilation);
    Tensor2 conv = conv1d(layer_norm(padded, w.norm_g, w.norm_b), w.conv_w, w.conv_b, spec);

    // Residual: out frame t aligns with padded frame t + ctx_width.
    Tensor2 out = relu(conv);
    for (int r = 0; r < channels; ++r)
        for (int t = 0; t < out.cols; ++t)
            out.at(r, t) += in_chunk.at(r, t);

    // Context for the next chunk: rightmost ctx_width frames of the
    // pre-conv padded signal.
    Tensor2 next(channels, ctx_width);
    for (int r = 0; r < channels; ++r)
        for (int c = 0; c < ctx_width; ++c)
            next.at(r, c) = padded.at(r, padded.cols - ctx_width + c);
    state.context = std::move(next);
    return out;
}

Tensor2 encode_chunk(const Tensor2& y_k, std::vector<DccLayerState>& states,
                     const EncoderWeights& w) {
    if (states.size() != w.layers.size())
        throw std::invalid_argument("encode_chunk: state count != layer count");
    Tensor2 x = y_k;
    for (size_t i = 0; i < w.layers.size(); ++i)
        x = dcc_layer_step(x, states[i], w.layers[i]);
    return x;
}

Tensor2 encode_offline(const Tensor2& y, const EncoderWeights& w) {
    Tensor2 x = y;
    for (const auto& layer : w.layers) {
        const int kernel = layer.conv_w.d2;
        const int pad = static_cast<int>((kernel - 1) * layer.dilation);
        const Tensor2 padded = concat_cols(Tensor2(x.rows, pad), x);

        ConvSpec spec;
        spec.in_channels = x.rows;
        spec.out_channels = x.rows;
        spec.kernel_size = kernel;
        spec.stride = 1;
        spec.dilation = static_cast<int>(layer.dilation);
        Tensor2 conv =
            conv1d(layer_norm(padded, layer.norm_g, layer.norm_b), layer.conv_w,
                   layer.conv_b, spec);
        Tensor2 out = relu(conv);
        for (int r = 0; r < out.rows; ++r)
            for (int t = 0; t < out.cols; ++t)
                out.at(r, t) += x.at(r, t);
        x = std::move(out);
    }
    return x;
}

} // namespace waveformer
