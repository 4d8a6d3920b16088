#include "hdrtv/hdcfm.hpp"

#include <cmath>

#include "hdrtv/dyct.hpp"
#include "hdrtv/modulation.hpp"

namespace hdrtv {

namespace {

void validate(const HdcfmConfig& cfg) {
    if (cfg.channels < 4)
        throw ConfigError("hdcfm: channels must be >= 4");
    if (cfg.dyct_blocks < 1)
        throw ConfigError("hdcfm: dyct_blocks must be >= 1");
    if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
        throw ConfigError("hdcfm: kernel must be odd and positive");
}

} // namespace

ParamCensus census_from_specs(const std::vector<WeightSpec>& specs) {
    ParamCensus census;
    for (const auto& s : specs) {
        census.entries.push_back({s.name, s.dims, s.count()});
        census.total += s.count();
    }
    return census;
}

std::vector<WeightSpec> hdcfm_weight_specs(const HdcfmConfig& cfg) {
    validate(cfg);
    const auto c = static_cast<std::uint32_t>(cfg.channels);
    std::vector<WeightSpec> specs;
    specs.push_back({"hdcfm.head.weight", {c, 3, 3, 3}});
    specs.push_back({"hdcfm.head.bias", {c}});
    for (int i = 0; i < 5; ++i) {
        const std::uint32_t in = i == 0 ? 3u : c;
        specs.push_back({"hme.down." + std::to_string(i) + ".weight", {c, in, 3, 3}});
        specs.push_back({"hme.down." + std::to_string(i) + ".bias", {c}});
    }
    specs.push_back({"hme.global.weight", {2 * c, c, 1, 1}});
    specs.push_back({"hme.global.bias", {2 * c}});
    specs.push_back({"hme.local.weight", {2 * c, c, 1, 1}});
    specs.push_back({"hme.local.bias", {2 * c}});
    for (int i = 0; i < cfg.dyct_blocks; ++i)
        append_dyct_specs(specs, "dyct." + std::to_string(i) + ".", cfg.channels,
                          cfg.kernel);
    specs.push_back({"hdcfm.tail.weight", {3, c, 3, 3}});
    specs.push_back({"hdcfm.tail.bias", {3}});
    return specs;
}

ParamCensus count_params(const HdcfmConfig& cfg) {
    return census_from_specs(hdcfm_weight_specs(cfg));
}

HdcfmConfig infer_hdcfm_config(const ModelWeights& weights) {
    HdcfmConfig cfg;
    const WeightTensor& head = weights.get("hdcfm.head.weight");
    if (head.dims.size() != 4)
        throw ShapeError("hdcfm.head.weight must be rank 4");
    cfg.channels = static_cast<int>(head.dims[0]);

    const WeightTensor& skp1 = weights.get("dyct.0.skp.1.weight");
    const int taps = static_cast<int>(skp1.dims[0]);
    cfg.kernel = static_cast<int>(std::lround(std::sqrt(static_cast<double>(taps))));
    if (cfg.kernel * cfg.kernel != taps)
        throw ShapeError("dyct.0.skp.1.weight output is not a square tap count");

    int blocks = 0;
    while (weights.contains("dyct." + std::to_string(blocks) + ".skp.0.weight"))
        ++blocks;
    cfg.dyct_blocks = blocks;
    validate(cfg);
    return cfg;
}

ImageFrame hdcfm_forward(const ImageFrame& x_s, const ModelWeights& weights,
                         const HdcfmConfig& cfg) {
    validate(cfg);
    if (x_s.transfer() != Transfer::SdrGamma)
        throw StateError("hdcfm_forward: input must be SDR-gamma coded");
    if (x_s.height() % 32 != 0 || x_s.width() % 32 != 0)
        throw ShapeError("hdcfm_forward: frame dims must be divisible by 32");

    const ModulationSet m = hme_estimate(x_s, weights, cfg.channels);

    Tensor f = conv2d(x_s.pixels(), conv_params(weights, "hdcfm.head"));
    f = hm_apply(f, m);
    for (int i = 0; i < cfg.dyct_blocks; ++i)
        f = dyct_forward(f, weights, "dyct." + std::to_string(i) + ".", cfg.kernel);
    f = hm_apply(f, m); // the one estimated set modulates both sites
    f = conv2d(f, conv_params(weights, "hdcfm.tail"));
    return ImageFrame(std::move(f), Gamut::BT2020, Transfer::PQ);
}

} // namespace hdrtv
