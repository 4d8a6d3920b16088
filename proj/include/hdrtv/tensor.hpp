#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hdrtv/errors.hpp"

namespace hdrtv {

// Rank-3 float32 array in channel-major (c, y, x) order. This is the single
// currency of every network operation. There is no batch dimension: the
// engine processes one frame at a time.
//
// Operations treat tensors as immutable values and return new tensors, so
// concurrent calls on distinct inputs are safe.
class Tensor {
public:
    Tensor() = default;
    Tensor(int channels, int height, int width);
    static Tensor full(int channels, int height, int width, float value);

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return data_.size(); }

    float operator()(int c, int y, int x) const { return data_[offset(c, y, x)]; }
    float& operator()(int c, int y, int x) { return data_[offset(c, y, x)]; }

    std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    bool same_shape(const Tensor& other) const {
        return channels_ == other.channels_ && height_ == other.height_ &&
               width_ == other.width_;
    }

private:
    std::size_t offset(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

// Static convolution parameters. Weight layout is (out_ch, in_ch, k, k),
// row-major. Padding is always replicate (edge clamp): constant fields stay
// constant and frame borders see no dark halo.
struct ConvParams {
    std::span<const float> weight;
    std::span<const float> bias;
    int out_ch = 0;
    int in_ch = 0;
    int k = 3;      // odd
    int stride = 1; // 1 or 2
};

// Network activations saturate at this magnitude. Kernel-predicting layers
// make the filtering stack cubic in activation scale, so unbounded values
// would overflow float32 within a few blocks under arbitrary weight draws;
// with every feature bounded the worst single expression (a k^2-tap sum of
// triple products, 9 * (1e12)^3) stays below FLT_MAX. The bound is inert at
// sane weight scales.
inline constexpr float kActivationBound = 1e12f;

inline float saturate_activation(float v) {
    return v > kActivationBound ? kActivationBound
                                : (v < -kActivationBound ? -kActivationBound : v);
}

// Cross-correlation with replicate padding. Stride 2 yields ceil(H/2) x
// ceil(W/2). Accumulation is float32 in a fixed per-output-element order, so
// results do not depend on scheduling.
Tensor conv2d(const Tensor& input, const ConvParams& params);

Tensor relu(const Tensor& input);

// Bilinear resampling by an integer factor, align-corners-false convention.
// Interpolation uses the lerp form a + t*(b-a), which maps constant fields
// to exactly the same constant.
Tensor bilinear_upsample(const Tensor& input, int factor);

// Per-channel arithmetic mean; output is C x 1 x 1.
Tensor global_avg_pool(const Tensor& input);

// Softmax over all pixels of a single-channel map. Shift-invariant (the max
// logit is subtracted before exponentiation); outputs sum to 1.
Tensor softmax_spatial(const Tensor& input);

Tensor clamp01(const Tensor& input);

// Throws Error if any element is NaN or Inf. Called by ops on their results
// so a numerical blow-up is reported at its source.
void ensure_finite(const Tensor& t, const char* op);

} // namespace hdrtv
