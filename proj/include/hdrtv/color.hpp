#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hdrtv/tensor.hpp"

namespace hdrtv {

enum class Gamut { BT709, BT2020 };
enum class Transfer { SdrGamma, PQ, Linear };

const char* to_string(Gamut g);
const char* to_string(Transfer t);

// A 3xHxW pixel tensor plus the colorimetry it is expressed in. Carrying the
// tags on the value prevents SDR-gamma and PQ-coded data from being mixed
// silently; every operation checks them at its boundary. Pixel values are
// clamped to [0,1] on construction.
class ImageFrame {
public:
    ImageFrame(Tensor pixels, Gamut gamut, Transfer transfer);

    const Tensor& pixels() const { return pixels_; }
    Gamut gamut() const { return gamut_; }
    Transfer transfer() const { return transfer_; }
    int height() const { return pixels_.height(); }
    int width() const { return pixels_.width(); }

private:
    Tensor pixels_;
    Gamut gamut_;
    Transfer transfer_;
};

// Soft over-exposure map, 1xHxW, clamped to [0,1] on construction.
class Mask {
public:
    explicit Mask(Tensor values);

    const Tensor& values() const { return values_; }
    int height() const { return values_.height(); }
    int width() const { return values_.width(); }

private:
    Tensor values_;
};

// SDR transfer: pure power 2.4 (BT.1886 with zero black lift), so the pair
// is exactly invertible.
double sdr_eotf_scalar(double v);
double sdr_oetf_scalar(double v);

// ST-2084 perceptual quantizer, 10000 nit peak. pq_eotf_scalar maps a code
// value in [0,1] to nits; pq_oetf_scalar is its closed-form inverse.
double pq_eotf_scalar(double code);
double pq_oetf_scalar(double nits);

ImageFrame sdr_eotf(const ImageFrame& frame); // SdrGamma -> Linear
ImageFrame sdr_oetf(const ImageFrame& frame); // Linear -> SdrGamma

// PQ -> absolute luminance per channel, in nits (0..10000).
Tensor pq_eotf(const ImageFrame& frame);
// nits -> PQ code values; out-of-range inputs clamp, never error.
ImageFrame pq_oetf(const Tensor& nits, Gamut gamut);

struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};
};

// Conversion matrix between linear BT.709 and BT.2020, derived at first use
// from the primaries and the shared D65 white point rather than transcribed.
const Mat3& gamut_matrix(Gamut from, Gamut to);

// 3x3 per-pixel matrix multiply; requires a Linear frame. Negative results
// clamp to zero. Same-gamut requests return the frame unchanged.
ImageFrame gamut_convert(const ImageFrame& frame, Gamut target);

struct QuantizedImage {
    int bits = 16; // 8 or 16
    int height = 0;
    int width = 0;
    Gamut gamut = Gamut::BT709;
    Transfer transfer = Transfer::SdrGamma;
    std::vector<std::uint16_t> codes; // 3*H*W, channel-major
};

// round(v * (2^bits - 1)), half away from zero.
std::uint16_t quantize_value(float v, int bits);
float dequantize_value(std::uint16_t code, int bits);

QuantizedImage quantize(const ImageFrame& frame, int bits);
ImageFrame dequantize(const QuantizedImage& image);

// Per pixel: clamp((max(R,G,B) - tau) / ramp, 0, 1). A linear ramp keeps the
// downstream blend seam-free.
Mask overexposure_mask(const ImageFrame& sdr, float tau = 0.95f, float ramp = 0.05f);

} // namespace hdrtv
