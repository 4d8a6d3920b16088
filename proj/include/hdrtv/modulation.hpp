#pragma once

#include "hdrtv/color.hpp"
#include "hdrtv/tensor.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

// The four modulation fields: global per-channel scale/shift and local
// per-channel-per-pixel scale/shift. Local fields must match the spatial
// dims of the feature map they modulate.
struct ModulationSet {
    Tensor v_ga; // C x 1 x 1
    Tensor v_gb; // C x 1 x 1
    Tensor v_la; // C x H x W
    Tensor v_lb; // C x H x W
};

// scale 1 / shift 0 everywhere; hm_apply with this set is the exact identity.
ModulationSet identity_modulation(int channels, int height, int width);

// Estimates the modulation fields from the SDR frame: five stride-2 3x3
// convs with ReLU down to 1/32 resolution, then a pooled 1x1 conv for the
// global pair and a 1x1 conv + x32 bilinear upsample for the local pair.
// Frame dims must be divisible by 32.
//
// Weight names: hme.down.{0..4}.{weight,bias}, hme.global.{weight,bias},
// hme.local.{weight,bias}.
ModulationSet hme_estimate(const ImageFrame& x_s, const ModelWeights& weights,
                           int channels);

// out = (f * v_ga + v_gb) * v_la + v_lb, global vectors broadcast over space.
Tensor hm_apply(const Tensor& f, const ModulationSet& m);

} // namespace hdrtv
