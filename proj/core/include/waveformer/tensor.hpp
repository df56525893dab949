#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace waveformer {

/// Dense 2-D array, rows = channels, cols = frames. Row-major storage,
/// so one channel's samples are contiguous in time.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<float> data;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0f) {}

    float& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    float at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    float* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const float* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
};

/// 3-D weight array, [d0][d1][d2] row-major. Convolution kernels use
/// [out_channels][in_channels][kernel] (forward) or
/// [in_channels][out_channels][kernel] (transposed).
struct Tensor3 {
    int d0 = 0;
    int d1 = 0;
    int d2 = 0;
    std::vector<float> data;

    Tensor3() = default;
    Tensor3(int a, int b, int c)
        : d0(a), d1(b), d2(c), data(static_cast<size_t>(a) * b * c, 0.0f) {}

    float& at(int a, int b, int c) {
        return data[(static_cast<size_t>(a) * d1 + b) * d2 + c];
    }
    float at(int a, int b, int c) const {
        return data[(static_cast<size_t>(a) * d1 + b) * d2 + c];
    }
};

struct ConvSpec {
    int in_channels = 1;
    int out_channels = 1;
    int kernel_size = 1;
    int stride = 1;
    int dilation = 1;
};

/// Multiply-accumulate counter, incremented by the conv/linear/attention
/// cores (normalizations and activations are not counted). Thread-local.
uint64_t mac_count();
void mac_reset();

/// Kernel path selection. The blocked path reorders loops over independent
/// output elements only; per-element accumulation order is identical to the
/// scalar path, so both produce bitwise-equal results.
void set_blocked_kernels(bool on);
bool blocked_kernels();

/// 1-D convolution. weights is [out][in][kernel]; the input is virtually
/// zero-padded with left_pad/right_pad frames. Accumulation in double,
/// storage in float.
Tensor2 conv1d(const Tensor2& input, const Tensor3& weights, std::span<const float> bias,
               const ConvSpec& spec, int left_pad = 0, int right_pad = 0);

/// Transposed 1-D convolution (overlap-add synthesis). weights is
/// [in][out][kernel]; input frame t scatters kernel_size samples starting at
/// t*stride, overlaps summing. Output is [out][(cols-1)*stride + kernel].
Tensor2 conv_transpose1d(const Tensor2& input, const Tensor3& weights,
                         std::span<const float> bias, const ConvSpec& spec);

/// Per-frame normalization over the channel dimension, then affine per
/// channel. gain/bias length == input.rows.
Tensor2 layer_norm(const Tensor2& input, std::span<const float> gain,
                   std::span<const float> bias, float eps = 1e-5f);

/// Scaled dot-product attention. queries/keys/values are channels x frames;
/// keys and values share a frame count. Softmax is max-subtracted.
Tensor2 attention(const Tensor2& queries, const Tensor2& keys, const Tensor2& values,
                  int heads);

/// Affine map per frame: weights [out][in] applied to every column.
Tensor2 linear(const Tensor2& input, const Tensor2& weights, std::span<const float> bias);

Tensor2 relu(const Tensor2& input);

Tensor2 concat_cols(const Tensor2& a, const Tensor2& b);

} // namespace waveformer
