#include "hdrtv/modulation.hpp"

#include <string>
#include <utility>

namespace hdrtv {

namespace {

// Splits a 2C-channel tensor into its first and second C-channel halves.
std::pair<Tensor, Tensor> split_halves(const Tensor& t) {
    const int c = t.channels() / 2;
    Tensor a(c, t.height(), t.width());
    Tensor b(c, t.height(), t.width());
    for (int i = 0; i < c; ++i) {
        for (int y = 0; y < t.height(); ++y) {
            for (int x = 0; x < t.width(); ++x) {
                a(i, y, x) = t(i, y, x);
                b(i, y, x) = t(c + i, y, x);
            }
        }
    }
    return {std::move(a), std::move(b)};
}

} // namespace

ModulationSet identity_modulation(int channels, int height, int width) {
    return {Tensor::full(channels, 1, 1, 1.0f), Tensor(channels, 1, 1),
            Tensor::full(channels, height, width, 1.0f), Tensor(channels, height, width)};
}

ModulationSet hme_estimate(const ImageFrame& x_s, const ModelWeights& weights,
                           int channels) {
    const Tensor& px = x_s.pixels();
    if (px.height() % 32 != 0 || px.width() % 32 != 0)
        throw ShapeError("hme_estimate: frame dims must be divisible by 32, got " +
                         std::to_string(px.height()) + "x" + std::to_string(px.width()));

    Tensor f = px;
    for (int i = 0; i < 5; ++i)
        f = relu(conv2d(f, conv_params(weights, "hme.down." + std::to_string(i), 2)));
    if (f.channels() != channels)
        throw ShapeError("hme_estimate: downsample stack emits " +
                         std::to_string(f.channels()) + " channels, expected " +
                         std::to_string(channels));

    const Tensor global_pair = conv2d(global_avg_pool(f), conv_params(weights, "hme.global"));
    const Tensor local_pair =
        bilinear_upsample(conv2d(f, conv_params(weights, "hme.local")), 32);
    if (global_pair.channels() != 2 * channels || local_pair.channels() != 2 * channels)
        throw ShapeError("hme_estimate: modulation heads must emit 2C channels");

    auto [v_ga, v_gb] = split_halves(global_pair);
    auto [v_la, v_lb] = split_halves(local_pair);
    return {std::move(v_ga), std::move(v_gb), std::move(v_la), std::move(v_lb)};
}

Tensor hm_apply(const Tensor& f, const ModulationSet& m) {
    if (m.v_ga.channels() != f.channels() || m.v_gb.channels() != f.channels())
        throw ShapeError("hm_apply: global vectors do not match feature channels");
    if (!m.v_la.same_shape(f) || !m.v_lb.same_shape(f))
        throw ShapeError("hm_apply: local fields do not match feature shape");

    Tensor out(f.channels(), f.height(), f.width());
    for (int c = 0; c < f.channels(); ++c) {
        const float ga = m.v_ga(c, 0, 0);
        const float gb = m.v_gb(c, 0, 0);
        for (int y = 0; y < f.height(); ++y)
            for (int x = 0; x < f.width(); ++x)
                out(c, y, x) = saturate_activation(
                    (f(c, y, x) * ga + gb) * m.v_la(c, y, x) + m.v_lb(c, y, x));
    }
    ensure_finite(out, "hm_apply");
    return out;
}

} // namespace hdrtv
