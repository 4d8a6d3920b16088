#include "hdrtv/pdcg.hpp"

#include <string>

#include "hdrtv/dyct.hpp"

namespace hdrtv {

namespace {

void validate(const PdcgConfig& cfg) {
    if (cfg.channels < 4)
        throw ConfigError("pdcg: channels must be >= 4");
    if (cfg.blocks < 1)
        throw ConfigError("pdcg: blocks must be >= 1");
}

Tensor concat_mask(const Tensor& rgb, const Tensor& mask) {
    Tensor out(4, rgb.height(), rgb.width());
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < rgb.height(); ++y)
            for (int x = 0; x < rgb.width(); ++x)
                out(c, y, x) = rgb(c, y, x);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            out(3, y, x) = mask(0, y, x);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw ShapeError("pdcg: skip-connection shapes differ");
    Tensor out = a;
    auto dst = out.data();
    const auto src = b.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = saturate_activation(dst[i] + src[i]);
    return out;
}

} // namespace

std::vector<WeightSpec> pdcg_weight_specs(const PdcgConfig& cfg) {
    validate(cfg);
    const auto c = static_cast<std::uint32_t>(cfg.channels);
    std::vector<WeightSpec> specs;
    specs.push_back({"pdcg.down.0.weight", {c, 4, 3, 3}});
    specs.push_back({"pdcg.down.0.bias", {c}});
    for (int i = 1; i < 3; ++i) {
        specs.push_back({"pdcg.down." + std::to_string(i) + ".weight", {c, c, 3, 3}});
        specs.push_back({"pdcg.down." + std::to_string(i) + ".bias", {c}});
    }
    for (int i = 0; i < cfg.blocks; ++i) {
        const std::string prefix = "pdcg.block." + std::to_string(i) + ".";
        append_dyct_specs(specs, prefix + "dyct.", cfg.channels, 3);
        specs.push_back({prefix + "conv.weight", {c, c, 3, 3}});
        specs.push_back({prefix + "conv.bias", {c}});
    }
    for (int i = 0; i < 3; ++i) {
        specs.push_back({"pdcg.up." + std::to_string(i) + ".weight", {c, c, 3, 3}});
        specs.push_back({"pdcg.up." + std::to_string(i) + ".bias", {c}});
    }
    specs.push_back({"pdcg.tail.weight", {3, c, 3, 3}});
    specs.push_back({"pdcg.tail.bias", {3}});
    return specs;
}

ParamCensus count_params(const PdcgConfig& cfg) {
    return census_from_specs(pdcg_weight_specs(cfg));
}

PdcgConfig infer_pdcg_config(const ModelWeights& weights) {
    PdcgConfig cfg;
    const WeightTensor& down0 = weights.get("pdcg.down.0.weight");
    if (down0.dims.size() != 4)
        throw ShapeError("pdcg.down.0.weight must be rank 4");
    cfg.channels = static_cast<int>(down0.dims[0]);
    int blocks = 0;
    while (weights.contains("pdcg.block." + std::to_string(blocks) + ".conv.weight"))
        ++blocks;
    cfg.blocks = blocks;
    validate(cfg);
    return cfg;
}

ImageFrame pdcg_forward(const ImageFrame& x_hr, const Mask& m_h,
                        const ModelWeights& weights, const PdcgConfig& cfg) {
    validate(cfg);
    if (x_hr.transfer() != Transfer::PQ)
        throw StateError("pdcg_forward: input must be PQ coded");
    if (x_hr.height() % 8 != 0 || x_hr.width() % 8 != 0)
        throw ShapeError("pdcg_forward: frame dims must be divisible by 8");
    if (m_h.height() != x_hr.height() || m_h.width() != x_hr.width())
        throw ShapeError("pdcg_forward: mask dims do not match the frame");

    const Tensor input = concat_mask(x_hr.pixels(), m_h.values());
    const Tensor d1 = relu(conv2d(input, conv_params(weights, "pdcg.down.0", 2)));
    const Tensor d2 = relu(conv2d(d1, conv_params(weights, "pdcg.down.1", 2)));
    const Tensor d3 = relu(conv2d(d2, conv_params(weights, "pdcg.down.2", 2)));

    Tensor f = d3;
    for (int i = 0; i < cfg.blocks; ++i) {
        const std::string prefix = "pdcg.block." + std::to_string(i) + ".";
        f = add(f, conv2d(dyct_forward(f, weights, prefix + "dyct."),
                          conv_params(weights, prefix + "conv")));
    }

    Tensor u = conv2d(bilinear_upsample(f, 2), conv_params(weights, "pdcg.up.0"));
    u = add(u, d2); // the only skip the decoder takes
    u = conv2d(bilinear_upsample(u, 2), conv_params(weights, "pdcg.up.1"));
    u = conv2d(bilinear_upsample(u, 2), conv_params(weights, "pdcg.up.2"));
    Tensor out = conv2d(u, conv_params(weights, "pdcg.tail"));
    return ImageFrame(std::move(out), x_hr.gamut(), Transfer::PQ);
}

ImageFrame blend(const ImageFrame& raw, const ImageFrame& x_hr, const Mask& m_h) {
    if (raw.height() != x_hr.height() || raw.width() != x_hr.width() ||
        m_h.height() != x_hr.height() || m_h.width() != x_hr.width())
        throw ShapeError("blend: frame and mask dims must match");
    if (raw.gamut() != x_hr.gamut() || raw.transfer() != x_hr.transfer())
        throw StateError("blend: inputs carry different colorimetry tags");

    const Tensor& a = raw.pixels();
    const Tensor& b = x_hr.pixels();
    Tensor out(3, a.height(), a.width());
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < a.height(); ++y) {
            for (int x = 0; x < a.width(); ++x) {
                const float m = m_h.values()(0, y, x);
                const float r = a(c, y, x);
                const float h = b(c, y, x);
                float v = r * m + h * (1.0f - m);
                const float lo = r < h ? r : h;
                const float hi = r < h ? h : r;
                v = v < lo ? lo : (v > hi ? hi : v);
                out(c, y, x) = v;
            }
        }
    }
    return ImageFrame(std::move(out), x_hr.gamut(), x_hr.transfer());
}

} // namespace hdrtv
