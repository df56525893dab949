#include "waveformer/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace waveformer {

namespace {
thread_local uint64_t g_mac_count = 0;
bool g_blocked = true;
} // namespace

uint64_t mac_count() { return g_mac_count; }
void mac_reset() { g_mac_count = 0; }
void set_blocked_kernels(bool on) { g_blocked = on; }
bool blocked_kernels() { return g_blocked; }

Tensor2 conv1d(const Tensor2& input, const Tensor3& weights, std::span<const float> bias,
               const ConvSpec& spec, int left_pad, int right_pad) {
    if (spec.in_channels < 1 || spec.out_channels < 1 || spec.kernel_size < 1 ||
        spec.stride < 1 || spec.dilation < 1)
        throw std::invalid_argument("conv1d: conv spec fields must be >= 1");
    if (input.rows != spec.in_channels)
        throw std::invalid_argument("conv1d: input rows != in_channels");
    if (input.cols < 1)
        throw std::invalid_argument("conv1d: zero-length input");
    if (weights.d0 != spec.out_channels || weights.d1 != spec.in_channels ||
        weights.d2 != spec.kernel_size)
        throw std::invalid_argument("conv1d: weight shape mismatch");
    if (static_cast<int>(bias.size()) != spec.out_channels)
        throw std::invalid_argument("conv1d: bias length != out_channels");

    const int span = spec.dilation * (spec.kernel_size - 1) + 1;
    const int padded = left_pad + input.cols + right_pad;
    if (padded < span)
        throw std::invalid_argument("conv1d: padded length shorter than kernel span");

    const int out_frames = (padded - span) / spec.stride + 1;
    Tensor2 out(spec.out_channels, out_frames);
    g_mac_count += static_cast<uint64_t>(spec.out_channels) * out_frames *
                   spec.in_channels * spec.kernel_size;

    if (!g_blocked) {
        // Reference path: one output element at a time, taps outer, channels inner.
        for (int o = 0; o < spec.out_channels; ++o) {
            for (int t = 0; t < out_frames; ++t) {
                double acc = bias[o];
                for (int j = 0; j < spec.kernel_size; ++j) {
                    const int c = t * spec.stride + j * spec.dilation - left_pad;
                    if (c < 0 || c >= input.cols) continue;
                    for (int i = 0; i < spec.in_channels; ++i)
                        acc += static_cast<double>(weights.at(o, i, j)) * input.at(i, c);
                }
                out.at(o, t) = static_cast<float>(acc);
            }
        }
        return out;
    }

    // Blocked path: per output channel, accumulate all frames together so the
    // innermost loop runs over a contiguous input row. Per-element term order
    // (j outer, i inner) matches the reference path, so results are bitwise equal.
    std::vector<double> acc(out_frames);
    for (int o = 0; o < spec.out_channels; ++o) {
        std::fill(acc.begin(), acc.end(), static_cast<double>(bias[o]));
        for (int j = 0; j < spec.kernel_size; ++j) {
            const int off = j * spec.dilation - left_pad;
            // valid t range: 0 <= t*stride + off < input.cols
            int t0 = 0;
            if (off < 0) t0 = (-off + spec.stride - 1) / spec.stride;
            int t1 = out_frames; // exclusive
            if (off + (out_frames - 1) * spec.stride >= input.cols)
                t1 = (input.cols - 1 - off) / spec.stride + 1;
            if (t1 > out_frames) t1 = out_frames;
            if (t0 >= t1) continue;
            for (int i = 0; i < spec.in_channels; ++i) {
                const double w = weights.at(o, i, j);
                const float* x = input.row(i);
                for (int t = t0; t < t1; ++t)
                    acc[t] += w * x[t * spec.stride + off];
            }
        }
        for (int t = 0; t < out_frames; ++t) out.at(o, t) = static_cast<float>(acc[t]);
    }
    return out;
}

Tensor2 conv_transpose1d(const Tensor2& input, const Tensor3& weights,
                         std::span<const float> bias, const ConvSpec& spec) {
    if (input.rows != spec.in_channels)
        throw std::invalid_argument("conv_transpose1d: input rows != in_channels");
    if (input.cols < 1)
        throw std::invalid_argument("conv_transpose1d: zero-length input");
    if (weights.d0 != spec.in_channels || weights.d1 != spec.out_channels ||
        weights.d2 != spec.kernel_size)
        throw std::invalid_argument("conv_transpose1d: weight shape mismatch");
    if (static_cast<int>(bias.size()) != spec.out_channels)
        throw std::invalid_argument("conv_transpose1d: bias length != out_channels");

    const int out_len = (input.cols - 1) * spec.stride + spec.kernel_size;
    g_mac_count += static_cast<uint64_t>(spec.in_channels) * spec.out_channels *
                   spec.kernel_size * input.cols;

    Tensor2 out(spec.out_channels, out_len);
    std::vector<double> acc(out_len);
    for (int o = 0; o < spec.out_channels; ++o) {
        std::fill(acc.begin(), acc.end(), static_cast<double>(bias[o]));
        for (int t = 0; t < input.cols; ++t) {
            const int base = t * spec.stride;
            for (int i = 0; i < spec.in_channels; ++i) {
                const double x = input.at(i, t);
                for (int j = 0; j < spec.kernel_size; ++j)
                    acc[base + j] += x * weights.at(i, o, j);
            }
        }
        for (int s = 0; s < out_len; ++s) out.at(o, s) = static_cast<float>(acc[s]);
    }
    return out;
}

Tensor2 layer_norm(const Tensor2& input, std::span<const float> gain,
                   std::span<const float> bias, float eps) {
    if (input.rows < 1)
        throw std::invalid_argument("layer_norm: zero channels");
    if (static_cast<int>(gain.size()) != input.rows ||
        static_cast<int>(bias.size()) != input.rows)
        throw std::invalid_argument("layer_norm: gain/bias length != rows");

    Tensor2 out(input.rows, input.cols);
    for (int t = 0; t < input.cols; ++t) {
        double mean = 0.0;
        for (int r = 0; r < input.rows; ++r) mean += input.at(r, t);
        mean /= input.rows;
        double var = 0.0;
        for (int r = 0; r < input.rows; ++r) {
            const double d = input.at(r, t) - mean;
            var += d * d;
        }
        var /= input.rows;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int r = 0; r < input.rows; ++r)
            out.at(r, t) = static_cast<float>((input.at(r, t) - mean) * inv * gain[r] + bias[r]);
    }
    return out;
}

Tensor2 attention(const Tensor2& queries, const Tensor2& keys, const Tensor2& values,
                  int heads) {
    if (heads < 1) throw std::invalid_argument("attention: heads must be >= 1");
    if (queries.rows != keys.rows || keys.rows != values.rows)
        throw std::invalid_argument("attention: channel dims must agree");
    if (keys.cols != values.cols)
        throw std::invalid_argument("attention: keys/values frame counts differ");
    if (queries.rows % heads != 0)
        throw std::invalid_argument("attention: channel dim not divisible by heads");

    const int d = queries.rows;
    const int dh = d / heads;
    const int tq = queries.cols;
    const int tk = keys.cols;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    Tensor2 out(d, tq);
    std::vector<double> scores(tk);
    g_mac_count += 2ull * tq * tk * d;
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * dh;
        for (int q = 0; q < tq; ++q) {
            double maxv = -1e300;
            for (int k = 0; k < tk; ++k) {
                double s = 0.0;
                for (int c = c0; c < c0 + dh; ++c)
                    s += static_cast<double>(queries.at(c, q)) * keys.at(c, k);
                scores[k] = s * scale;
                maxv = std::max(maxv, scores[k]);
            }
            double denom = 0.0;
            for (int k = 0; k < tk; ++k) {
                scores[k] = std::exp(scores[k] - maxv);
                denom += scores[k];
            }
            for (int c = c0; c < c0 + dh; ++c) {
                double acc = 0.0;
                for (int k = 0; k < tk; ++k)
                    acc += scores[k] * values.at(c, k);
                out.at(c, q) = static_cast<float>(acc / denom);
            }
        }
    }
    return out;
}

Tensor2 linear(const Tensor2& input, const Tensor2& weights, std::span<const float> bias) {
    if (weights.cols != input.rows)
        throw std::invalid_argument("linear: weight cols != input rows");
    if (static_cast<int>(bias.size()) != weights.rows)
        throw std::invalid_argument("linear: bias length != weight rows");

    const int out_dim = weights.rows;
    Tensor2 out(out_dim, input.cols);
    g_mac_count += static_cast<uint64_t>(out_dim) * input.cols * input.rows;

    if (!g_blocked) {
        for (int o = 0; o < out_dim; ++o)
            for (int t = 0; t < input.cols; ++t) {
                double acc = bias[o];
                for (int i = 0; i < input.rows; ++i)
                    acc += static_cast<double>(weights.at(o, i)) * input.at(i, t);
                out.at(o, t) = static_cast<float>(acc);
            }
        return out;
    }

    std::vector<double> acc(input.cols);
    for (int o = 0; o < out_dim; ++o) {
        std::fill(acc.begin(), acc.end(), static_cast<double>(bias[o]));
        for (int i = 0; i < input.rows; ++i) {
            const double w = weights.at(o, i);
            const float* x = input.row(i);
            for (int t = 0; t < input.cols; ++t) acc[t] += w * x[t];
        }
        for (int t = 0; t < input.cols; ++t) out.at(o, t) = static_cast<float>(acc[t]);
    }
    return out;
}

Tensor2 relu(const Tensor2& input) {
    Tensor2 out = input;
    for (auto& v : out.data) v = std::max(v, 0.0f);
    return out;
}

Tensor2 concat_cols(const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows)
        throw std::invalid_argument("concat_cols: row counts differ");
    Tensor2 out(a.rows, a.cols + b.cols);
    for (int r = 0; r < a.rows; ++r) {
        std::copy(a.row(r), a.row(r) + a.cols, out.row(r));
        std::copy(b.row(r), b.row(r) + b.cols, out.row(r) + a.cols);
    }
    return out;
}

} // namespace waveformer
