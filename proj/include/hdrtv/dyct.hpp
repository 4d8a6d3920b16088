#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdrtv/tensor.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

// Per-pixel spatial filters: one k x k kernel per location, flattened along
// the channel axis as tap index u*k + v.
struct SpatialKernels {
    Tensor values; // k^2 x H x W
    int k = 3;
};

// Per-channel filters: one k x k kernel per feature channel.
struct ChannelKernels {
    Tensor values; // C x k x k
    int k = 3;
};

// Kernel prediction heads. `prefix` scopes the weight names, e.g. "dyct.0."
// or "pdcg.block.7.dyct.", and is followed by:
//   skp.{0,1}.{weight,bias}   3x3 conv C->C + ReLU, then 3x3 conv C->k^2
//   ckp.{weight,bias}         global average pool, then 1x1 conv C->C*k^2
//   cb.{attn,fc0,fc1}.{weight,bias}   context block (below)
// `normalize` softmaxes each predicted kernel over its k^2 taps. Off by
// default: the filter composes raw conv outputs.
SpatialKernels skp_predict(const Tensor& f, const ModelWeights& weights,
                           const std::string& prefix, int k = 3,
                           bool normalize = false);
ChannelKernels ckp_predict(const Tensor& f, const ModelWeights& weights,
                           const std::string& prefix, int k = 3,
                           bool normalize = false);

// Decoupled dynamic filtering with replicate padding:
//   out(c,i,j) = sum_{u,v} ks(u*k+v,i,j) * kc(c,u,v) * f(c, i+u-k/2, j+v-k/2)
// The combined tap weight ks*kc is formed on the fly per output element.
Tensor ddf_apply(const Tensor& f, const SpatialKernels& ks, const ChannelKernels& kc);

// Reference path for ddf_apply: materializes the combined filter as an
// explicit per-pixel matrix and multiplies it against the flattened
// neighborhood, per channel. Deliberately shares no code with ddf_apply.
// Compile with HDRTV_ORACLE_ACCUM_F64 for 64-bit accumulation.
Tensor ddf_oracle(const Tensor& f, const SpatialKernels& ks, const ChannelKernels& kc);

// Global context: attention-pooled descriptor (1x1 conv C->1, spatial
// softmax, weighted sum) passed through a C -> C/4 -> C bottleneck and
// broadcast-added back onto f. The residual is spatially uniform per channel.
Tensor context_block(const Tensor& f, const ModelWeights& weights,
                     const std::string& prefix);

// context_block(ddf_apply(f, skp_predict(f), ckp_predict(f)))
Tensor dyct_forward(const Tensor& f, const ModelWeights& weights,
                    const std::string& prefix, int k = 3,
                    bool normalize_kernels = false);

// Parameter budget of a full per-pixel feature transform versus the
// decoupled spatial + channel prediction it replaces.
struct TransformBudget {
    std::uint64_t full;      // H * W * C_out * k^2 * C_in
    std::uint64_t decoupled; // H * W * k^2 + C_in * k^2
    double ratio() const {
        return static_cast<double>(full) / static_cast<double>(decoupled);
    }
};

TransformBudget transform_budget(int height, int width, int c_in, int c_out, int k);

// Appends this block's parameter-tensor shapes under `prefix`.
void append_dyct_specs(std::vector<WeightSpec>& specs, const std::string& prefix,
                       int channels, int k);

} // namespace hdrtv
