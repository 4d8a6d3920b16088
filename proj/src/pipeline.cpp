#include "hdrtv/pipeline.hpp"

#include "hdrtv/hdcfm.hpp"
#include "hdrtv/pad.hpp"
#include "hdrtv/pdcg.hpp"
#include "hdrtv/png_io.hpp"

namespace hdrtv {

std::vector<WeightSpec> model_weight_specs(const ModelConfig& cfg) {
    std::vector<WeightSpec> specs = hdcfm_weight_specs(cfg.hdcfm);
    std::vector<WeightSpec> pdcg = pdcg_weight_specs(cfg.pdcg);
    specs.insert(specs.end(), std::make_move_iterator(pdcg.begin()),
                 std::make_move_iterator(pdcg.end()));
    return specs;
}

ModelWeights seeded_model_weights(std::uint64_t seed, const ModelConfig& cfg) {
    const auto specs = model_weight_specs(cfg);
    return seeded_weights(seed, specs);
}

ImageFrame convert_frame(const ImageFrame& sdr, const ModelWeights& weights,
                         const ConvertOptions& options) {
    auto [padded, record] = pad_to_multiple(sdr, 32);

    const HdcfmConfig hdcfm_cfg = infer_hdcfm_config(weights);
    const ImageFrame x_hr = hdcfm_forward(padded, weights, hdcfm_cfg);

    if (options.stage == Stage::Hdcfm)
        return unpad(x_hr, record);

    const Mask mask = overexposure_mask(padded, options.mask_tau, options.mask_ramp);
    const PdcgConfig pdcg_cfg = infer_pdcg_config(weights);
    const ImageFrame raw = pdcg_forward(x_hr, mask, weights, pdcg_cfg);
    return unpad(blend(raw, x_hr, mask), record);
}

void convert_file(const std::string& input_path, const std::string& output_path,
                  const std::string& weights_path, const ConvertOptions& options) {
    const ModelWeights weights = load_weights(weights_path);
    const ImageFrame sdr = read_png(input_path);
    if (sdr.transfer() != Transfer::SdrGamma)
        throw StateError("convert: input must be an 8-bit SDR PNG");
    write_png(convert_frame(sdr, weights, options), output_path, options.bits);
}

} // namespace hdrtv
