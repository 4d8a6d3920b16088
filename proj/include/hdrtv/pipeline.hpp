#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdrtv/color.hpp"
#include "hdrtv/config.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

enum class Stage { Hdcfm, Full };

struct ConvertOptions {
    Stage stage = Stage::Full;
    float mask_tau = 0.95f;
    float mask_ramp = 0.05f;
    int bits = 16;
};

// Both stages' parameter tensors, in serialization order.
std::vector<WeightSpec> model_weight_specs(const ModelConfig& cfg);

// Deterministic uniform [-0.5, 0.5) fill of every tensor in model_weight_specs.
ModelWeights seeded_model_weights(std::uint64_t seed, const ModelConfig& cfg = {});

// SDR frame -> HDR frame. Pads to a 32-multiple, runs stage 1 (and stage 2
// plus the masked blend when stage is Full), then crops back. Network widths
// are inferred from the weight store.
ImageFrame convert_frame(const ImageFrame& sdr, const ModelWeights& weights,
                         const ConvertOptions& options = {});

// read_png -> convert_frame -> write_png. A pure function of its inputs:
// repeated runs produce byte-identical output files.
void convert_file(const std::string& input_path, const std::string& output_path,
                  const std::string& weights_path, const ConvertOptions& options = {});

} // namespace hdrtv
