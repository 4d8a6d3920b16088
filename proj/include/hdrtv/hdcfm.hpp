#pragma once

#include <string>
#include <vector>

#include "hdrtv/color.hpp"
#include "hdrtv/config.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

struct ParamEntry {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::size_t count;
};

struct ParamCensus {
    std::vector<ParamEntry> entries;
    std::size_t total = 0;
};

ParamCensus census_from_specs(const std::vector<WeightSpec>& specs);

// Every parameter tensor the stage-1 forward pass reads, in a fixed order:
// hdcfm.head.*, hme.down.{0..4}.*, hme.global.*, hme.local.*,
// dyct.{i}.*, hdcfm.tail.*.
std::vector<WeightSpec> hdcfm_weight_specs(const HdcfmConfig& cfg);

// Exact parameter census of the stage-1 network.
ParamCensus count_params(const HdcfmConfig& cfg);

// Recovers the configuration from tensor shapes in a loaded store, so the
// container is self-describing.
HdcfmConfig infer_hdcfm_config(const ModelWeights& weights);

// Stage-1 mapping: SDR-gamma/BT.709 frame in, PQ/BT.2020 frame out.
// head conv -> HM -> DYCT blocks -> HM (same modulation set) -> tail conv,
// clamped to [0,1]. Frame dims must be divisible by 32.
ImageFrame hdcfm_forward(const ImageFrame& x_s, const ModelWeights& weights,
                         const HdcfmConfig& cfg = {});

} // namespace hdrtv
