#include "hdrtv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hdrtv {

namespace {

int clamp_index(int v, int hi) {
    return v < 0 ? 0 : (v > hi ? hi : v);
}

} // namespace

Tensor::Tensor(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 0 || height < 0 || width < 0)
        throw ShapeError("negative tensor dimension");
    data_.assign(static_cast<std::size_t>(channels) * height * width, 0.0f);
}

Tensor Tensor::full(int channels, int height, int width, float value) {
    Tensor t(channels, height, width);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

void ensure_finite(const Tensor& t, const char* op) {
    for (float v : t.data()) {
        if (!std::isfinite(v))
            throw Error(std::string("non-finite value produced by ") + op);
    }
}

Tensor conv2d(const Tensor& input, const ConvParams& params) {
    const int ci = params.in_ch;
    const int co = params.out_ch;
    const int k = params.k;
    const int s = params.stride;

    if (k < 1 || k % 2 == 0)
        throw ShapeError("conv2d: kernel size must be odd, got " + std::to_string(k));
    if (s != 1 && s != 2)
        throw ShapeError("conv2d: stride must be 1 or 2, got " + std::to_string(s));
    if (input.channels() != ci)
        throw ShapeError("conv2d: input has " + std::to_string(input.channels()) +
                         " channels, weights expect " + std::to_string(ci));
    if (params.weight.size() != static_cast<std::size_t>(co) * ci * k * k)
        throw ShapeError("conv2d: weight span size mismatch");
    if (params.bias.size() != static_cast<std::size_t>(co))
        throw ShapeError("conv2d: bias span size mismatch");

    const int h = input.height();
    const int w = input.width();
    const int oh = (h + s - 1) / s;
    const int ow = (w + s - 1) / s;
    const int p = k / 2;

    Tensor out(co, oh, ow);
    for (int oc = 0; oc < co; ++oc) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                float acc = params.bias[oc];
                for (int ic = 0; ic < ci; ++ic) {
                    const float* wrow =
                        params.weight.data() +
                        (static_cast<std::size_t>(oc) * ci + ic) * k * k;
                    for (int u = 0; u < k; ++u) {
                        const int iy = clamp_index(oy * s + u - p, h - 1);
                        for (int v = 0; v < k; ++v) {
                            const int ix = clamp_index(ox * s + v - p, w - 1);
                            acc += wrow[u * k + v] * input(ic, iy, ix);
                        }
                    }
                }
                out(oc, oy, ox) = saturate_activation(acc);
            }
        }
    }
    ensure_finite(out, "conv2d");
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (float& v : out.data())
        v = v < 0.0f ? 0.0f : v;
    return out;
}

Tensor bilinear_upsample(const Tensor& input, int factor) {
    if (factor < 1)
        throw ShapeError("bilinear_upsample: factor must be >= 1");
    if (factor == 1)
        return input;

    const int h = input.height();
    const int w = input.width();
    const int oh = h * factor;
    const int ow = w * factor;

    // Precompute the source column/row splits once per axis.
    struct Split {
        int lo, hi;
        float t;
    };
    auto make_splits = [factor](int out_n, int in_n) {
        std::vector<Split> s(out_n);
        for (int o = 0; o < out_n; ++o) {
            const double src = (o + 0.5) / factor - 0.5;
            double fl = std::floor(src);
            int lo = static_cast<int>(fl);
            float t = static_cast<float>(src - fl);
            int hi = lo + 1;
            s[o] = {clamp_index(lo, in_n - 1), clamp_index(hi, in_n - 1), t};
        }
        return s;
    };
    const auto ys = make_splits(oh, h);
    const auto xs = make_splits(ow, w);

    Tensor out(input.channels(), oh, ow);
    for (int c = 0; c < input.channels(); ++c) {
        for (int oy = 0; oy < oh; ++oy) {
            const Split& sy = ys[oy];
            for (int ox = 0; ox < ow; ++ox) {
                const Split& sx = xs[ox];
                const float a = input(c, sy.lo, sx.lo);
                const float b = input(c, sy.lo, sx.hi);
                const float cc = input(c, sy.hi, sx.lo);
                const float d = input(c, sy.hi, sx.hi);
                const float top = a + sx.t * (b - a);
                const float bot = cc + sx.t * (d - cc);
                out(c, oy, ox) = top + sy.t * (bot - top);
            }
        }
    }
    ensure_finite(out, "bilinear_upsample");
    return out;
}

Tensor global_avg_pool(const Tensor& input) {
    if (input.height() < 1 || input.width() < 1)
        throw ShapeError("global_avg_pool: empty spatial extent");
    const std::size_t n = static_cast<std::size_t>(input.height()) * input.width();
    Tensor out(input.channels(), 1, 1);
    for (int c = 0; c < input.channels(); ++c) {
        double sum = 0.0;
        for (int y = 0; y < input.height(); ++y)
            for (int x = 0; x < input.width(); ++x)
                sum += input(c, y, x);
        out(c, 0, 0) = static_cast<float>(sum / static_cast<double>(n));
    }
    ensure_finite(out, "global_avg_pool");
    return out;
}

Tensor softmax_spatial(const Tensor& input) {
    if (input.channels() != 1)
        throw ShapeError("softmax_spatial: expected a single channel, got " +
                         std::to_string(input.channels()));
    float maxv = input(0, 0, 0);
    for (float v : input.data())
        maxv = std::max(maxv, v);

    Tensor out(1, input.height(), input.width());
    double sum = 0.0;
    for (int y = 0; y < input.height(); ++y)
        for (int x = 0; x < input.width(); ++x)
            sum += std::exp(static_cast<double>(input(0, y, x)) - maxv);
    for (int y = 0; y < input.height(); ++y) {
        for (int x = 0; x < input.width(); ++x) {
            const double e = std::exp(static_cast<double>(input(0, y, x)) - maxv);
            out(0, y, x) = static_cast<float>(e / sum);
        }
    }
    ensure_finite(out, "softmax_spatial");
    return out;
}

Tensor clamp01(const Tensor& input) {
    Tensor out = input;
    for (float& v : out.data())
        v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return out;
}

} // namespace hdrtv
