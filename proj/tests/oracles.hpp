// Test-only reference implementations, independent of the library kernels.
// Everything here works in double precision with the most literal loop
// structure possible.
#pragma once

#include "waveformer/tensor.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    float uniform(float lo = -1.0f, float hi = 1.0f) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return static_cast<float>(lo + (hi - lo) * u);
    }
};

inline waveformer::Tensor2 random_tensor(Rng& rng, int rows, int cols) {
    waveformer::Tensor2 t(rows, cols);
    for (auto& v : t.data) v = rng.uniform();
    return t;
}

inline waveformer::Tensor3 random_tensor3(Rng& rng, int d0, int d1, int d2) {
    waveformer::Tensor3 t(d0, d1, d2);
    for (auto& v : t.data) v = rng.uniform();
    return t;
}

inline std::vector<float> random_vec(Rng& rng, int n) {
    std::vector<float> v(static_cast<size_t>(n));
    for (auto& x : v) x = rng.uniform();
    return v;
}

// Naive quintuple-loop convolution; zero outside input bounds.
inline std::vector<std::vector<double>>
conv1d(const waveformer::Tensor2& x, const waveformer::Tensor3& w,
       const std::vector<float>& bias, int stride, int dilation, int left_pad,
       int right_pad) {
    const int out_ch = w.d0;
    const int in_ch = w.d1;
    const int kernel = w.d2;
    const int padded = left_pad + x.cols + right_pad;
    const int out_frames = (padded - dilation * (kernel - 1) - 1) / stride + 1;

    std::vector<std::vector<double>> out(static_cast<size_t>(out_ch),
                                         std::vector<double>(static_cast<size_t>(out_frames)));
    for (int o = 0; o < out_ch; ++o)
        for (int t = 0; t < out_frames; ++t) {
            double acc = bias[static_cast<size_t>(o)];
            for (int i = 0; i < in_ch; ++i)
                for (int j = 0; j < kernel; ++j) {
                    const int c = t * stride + j * dilation - left_pad;
                    if (c < 0 || c >= x.cols) continue;
                    acc += static_cast<double>(w.at(o, i, j)) * x.at(i, c);
                }
            out[static_cast<size_t>(o)][static_cast<size_t>(t)] = acc;
        }
    return out;
}

// Scatter/overlap-add transposed convolution, w is [in][out][kernel].
inline std::vector<std::vector<double>>
conv_transpose1d(const waveformer::Tensor2& x, const waveformer::Tensor3& w,
                 const std::vector<float>& bias, int stride) {
    const int in_ch = w.d0;
    const int out_ch = w.d1;
    const int kernel = w.d2;
    const int out_len = (x.cols - 1) * stride + kernel;
    std::vector<std::vector<double>> out(static_cast<size_t>(out_ch),
                                         std::vector<double>(static_cast<size_t>(out_len)));
    for (int o = 0; o < out_ch; ++o)
        for (auto& v : out[static_cast<size_t>(o)]) v = bias[static_cast<size_t>(o)];
    for (int t = 0; t < x.cols; ++t)
        for (int i = 0; i < in_ch; ++i)
            for (int o = 0; o < out_ch; ++o)
                for (int j = 0; j < kernel; ++j)
                    out[static_cast<size_t>(o)][static_cast<size_t>(t * stride + j)] +=
                        static_cast<double>(x.at(i, t)) * w.at(i, o, j);
    return out;
}

inline std::vector<std::vector<double>>
matmul(const waveformer::Tensor2& x, const waveformer::Tensor2& w,
       const std::vector<float>& bias) {
    std::vector<std::vector<double>> out(static_cast<size_t>(w.rows),
                                         std::vector<double>(static_cast<size_t>(x.cols)));
    for (int o = 0; o < w.rows; ++o)
        for (int t = 0; t < x.cols; ++t) {
            double acc = bias[static_cast<size_t>(o)];
            for (int i = 0; i < x.rows; ++i)
                acc += static_cast<double>(w.at(o, i)) * x.at(i, t);
            out[static_cast<size_t>(o)][static_cast<size_t>(t)] = acc;
        }
    return out;
}

// Literal multi-head softmax attention.
inline std::vector<std::vector<double>>
attention(const waveformer::Tensor2& q, const waveformer::Tensor2& k,
          const waveformer::Tensor2& v, int heads) {
    const int d = q.rows;
    const int dh = d / heads;
    std::vector<std::vector<double>> out(static_cast<size_t>(d),
                                         std::vector<double>(static_cast<size_t>(q.cols)));
    for (int h = 0; h < heads; ++h)
        for (int tq = 0; tq < q.cols; ++tq) {
            std::vector<double> s(static_cast<size_t>(k.cols));
            double maxv = -1e300;
            for (int tk = 0; tk < k.cols; ++tk) {
                double dot = 0.0;
                for (int c = h * dh; c < (h + 1) * dh; ++c)
                    dot += static_cast<double>(q.at(c, tq)) * k.at(c, tk);
                s[static_cast<size_t>(tk)] = dot / std::sqrt(static_cast<double>(dh));
                maxv = std::max(maxv, s[static_cast<size_t>(tk)]);
            }
            double denom = 0.0;
            for (auto& e : s) {
                e = std::exp(e - maxv);
                denom += e;
            }
            for (auto& e : s) e /= denom;
            for (int c = h * dh; c < (h + 1) * dh; ++c) {
                double acc = 0.0;
                for (int tk = 0; tk < k.cols; ++tk)
                    acc += s[static_cast<size_t>(tk)] * v.at(c, tk);
                out[static_cast<size_t>(c)][static_cast<size_t>(tq)] = acc;
            }
        }
    return out;
}

inline double max_abs_diff(const waveformer::Tensor2& got,
                           const std::vector<std::vector<double>>& want) {
    double m = 0.0;
    for (int r = 0; r < got.rows; ++r)
        for (int c = 0; c < got.cols; ++c)
            m = std::max(m, std::abs(got.at(r, c) -
                                     want[static_cast<size_t>(r)][static_cast<size_t>(c)]));
    return m;
}

} // namespace oracle
