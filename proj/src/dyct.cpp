#include "hdrtv/dyct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hdrtv {

namespace {

int clamp_index(int v, int hi) {
    return v < 0 ? 0 : (v > hi ? hi : v);
}

// Softmax across one kernel's taps at the given memory stride.
void softmax_taps(float* taps, int count, int stride) {
    float maxv = taps[0];
    for (int t = 1; t < count; ++t)
        maxv = std::max(maxv, taps[t * stride]);
    double sum = 0.0;
    for (int t = 0; t < count; ++t)
        sum += std::exp(static_cast<double>(taps[t * stride]) - maxv);
    for (int t = 0; t < count; ++t)
        taps[t * stride] = static_cast<float>(
            std::exp(static_cast<double>(taps[t * stride]) - maxv) / sum);
}

} // namespace

SpatialKernels skp_predict(const Tensor& f, const ModelWeights& weights,
                           const std::string& prefix, int k, bool normalize) {
    Tensor h = relu(conv2d(f, conv_params(weights, prefix + "skp.0")));
    Tensor ks = conv2d(h, conv_params(weights, prefix + "skp.1"));
    if (ks.channels() != k * k)
        throw ShapeError("skp_predict: head emits " + std::to_string(ks.channels()) +
                         " channels, expected k^2 = " + std::to_string(k * k));
    if (normalize) {
        const int plane = ks.height() * ks.width();
        float* data = ks.data().data();
        for (int p = 0; p < plane; ++p)
            softmax_taps(data + p, k * k, plane);
    }
    return {std::move(ks), k};
}

ChannelKernels ckp_predict(const Tensor& f, const ModelWeights& weights,
                           const std::string& prefix, int k, bool normalize) {
    Tensor pooled = conv2d(global_avg_pool(f), conv_params(weights, prefix + "ckp"));
    if (pooled.channels() != f.channels() * k * k)
        throw ShapeError("ckp_predict: head emits " + std::to_string(pooled.channels()) +
                         " channels, expected C*k^2 = " +
                         std::to_string(f.channels() * k * k));
    Tensor kc(f.channels(), k, k);
    for (int c = 0; c < f.channels(); ++c)
        for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v)
                kc(c, u, v) = pooled((c * k + u) * k + v, 0, 0);
    if (normalize)
        for (int c = 0; c < f.channels(); ++c)
            softmax_taps(kc.data().data() + static_cast<std::size_t>(c) * k * k,
                         k * k, 1);
    return {std::move(kc), k};
}

Tensor ddf_apply(const Tensor& f, const SpatialKernels& ks, const ChannelKernels& kc) {
    const int k = ks.k;
    if (kc.k != k)
        throw ShapeError("ddf_apply: spatial and channel kernel sizes differ");
    if (ks.values.channels() != k * k || ks.values.height() != f.height() ||
        ks.values.width() != f.width())
        throw ShapeError("ddf_apply: spatial kernels must be k^2 x H x W");
    if (kc.values.channels() != f.channels() || kc.values.height() != k ||
        kc.values.width() != k)
        throw ShapeError("ddf_apply: channel kernels must be C x k x k");

    const int p = k / 2;
    const int h = f.height();
    const int w = f.width();
    Tensor out(f.channels(), h, w);
    for (int c = 0; c < f.channels(); ++c) {
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                float acc = 0.0f;
                for (int u = 0; u < k; ++u) {
                    const int iy = clamp_index(i + u - p, h - 1);
                    for (int v = 0; v < k; ++v) {
                        const int ix = clamp_index(j + v - p, w - 1);
                        acc += ks.values(u * k + v, i, j) * kc.values(c, u, v) *
                               f(c, iy, ix);
                    }
                }
                out(c, i, j) = saturate_activation(acc);
            }
        }
    }
    ensure_finite(out, "ddf_apply");
    return out;
}

Tensor context_block(const Tensor& f, const ModelWeights& weights,
                     const std::string& prefix) {
    const Tensor logits = conv2d(f, conv_params(weights, prefix + "cb.attn"));
    const Tensor attn = softmax_spatial(logits);

    Tensor context(f.channels(), 1, 1);
    for (int c = 0; c < f.channels(); ++c) {
        double sum = 0.0;
        for (int y = 0; y < f.height(); ++y)
            for (int x = 0; x < f.width(); ++x)
                sum += static_cast<double>(attn(0, y, x)) * f(c, y, x);
        context(c, 0, 0) = static_cast<float>(sum);
    }

    const Tensor hidden = relu(conv2d(context, conv_params(weights, prefix + "cb.fc0")));
    const Tensor offset = conv2d(hidden, conv_params(weights, prefix + "cb.fc1"));
    if (offset.channels() != f.channels())
        throw ShapeError("context_block: transform must emit C channels");

    Tensor out(f.channels(), f.height(), f.width());
    for (int c = 0; c < f.channels(); ++c) {
        const float o = offset(c, 0, 0);
        for (int y = 0; y < f.height(); ++y)
            for (int x = 0; x < f.width(); ++x)
                out(c, y, x) = saturate_activation(f(c, y, x) + o);
    }
    ensure_finite(out, "context_block");
    return out;
}

Tensor dyct_forward(const Tensor& f, const ModelWeights& weights,
                    const std::string& prefix, int k, bool normalize_kernels) {
    const SpatialKernels ks = skp_predict(f, weights, prefix, k, normalize_kernels);
    const ChannelKernels kc = ckp_predict(f, weights, prefix, k, normalize_kernels);
    return context_block(ddf_apply(f, ks, kc), weights, prefix);
}

TransformBudget transform_budget(int height, int width, int c_in, int c_out, int k) {
    const auto h = static_cast<std::uint64_t>(height);
    const auto w = static_cast<std::uint64_t>(width);
    const auto taps = static_cast<std::uint64_t>(k) * k;
    TransformBudget b;
    b.full = h * w * static_cast<std::uint64_t>(c_out) * taps * c_in;
    b.decoupled = h * w * taps + static_cast<std::uint64_t>(c_in) * taps;
    return b;
}

void append_dyct_specs(std::vector<WeightSpec>& specs, const std::string& prefix,
                       int channels, int k) {
    const auto c = static_cast<std::uint32_t>(channels);
    const auto kk = static_cast<std::uint32_t>(k * k);
    const std::uint32_t mid = c / 4;
    specs.push_back({prefix + "skp.0.weight", {c, c, 3, 3}});
    specs.push_back({prefix + "skp.0.bias", {c}});
    specs.push_back({prefix + "skp.1.weight", {kk, c, 3, 3}});
    specs.push_back({prefix + "skp.1.bias", {kk}});
    specs.push_back({prefix + "ckp.weight", {c * kk, c, 1, 1}});
    specs.push_back({prefix + "ckp.bias", {c * kk}});
    specs.push_back({prefix + "cb.attn.weight", {1, c, 1, 1}});
    specs.push_back({prefix + "cb.attn.bias", {1}});
    specs.push_back({prefix + "cb.fc0.weight", {mid, c, 1, 1}});
    specs.push_back({prefix + "cb.fc0.bias", {mid}});
    specs.push_back({prefix + "cb.fc1.weight", {c, mid, 1, 1}});
    specs.push_back({prefix + "cb.fc1.bias", {c}});
}

} // namespace hdrtv
