#pragma once

#include <vector>

#include "hdrtv/color.hpp"
#include "hdrtv/config.hpp"
#include "hdrtv/hdcfm.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

// Parameter tensors of the stage-2 generator: pdcg.down.{0..2}.*,
// pdcg.block.{i}.{dyct.*,conv.*}, pdcg.up.{0..2}.*, pdcg.tail.*.
std::vector<WeightSpec> pdcg_weight_specs(const PdcgConfig& cfg);

ParamCensus count_params(const PdcgConfig& cfg);

PdcgConfig infer_pdcg_config(const ModelWeights& weights);

// Stage-2 over-exposure generator. The mask enters as a fourth input
// channel; three stride-2 convs, `blocks` residual DYCT blocks at 1/8
// resolution, then three bilinear x2 upsample + conv stages (with the 1/4
// resolution skip added after the first) and a final conv to RGB, clamped
// to [0,1]. Frame dims must be divisible by 8.
ImageFrame pdcg_forward(const ImageFrame& x_hr, const Mask& m_h,
                        const ModelWeights& weights, const PdcgConfig& cfg = {});

// out = raw * m + x_hr * (1 - m), mask broadcast across channels. Each
// result is clamped to the per-pixel [min, max] envelope of its two inputs
// so convexity holds exactly in float arithmetic.
ImageFrame blend(const ImageFrame& raw, const ImageFrame& x_hr, const Mask& m_h);

} // namespace hdrtv
