#pragma once

#include <array>
#include <cstdint>

#include "hdrtv/color.hpp"

namespace hdrtv {

// 10*log10(1/MSE) over all channels of [0,1]-coded frames; identical inputs
// report +infinity. Frames must agree in dims and transfer tag.
double psnr(const ImageFrame& a, const ImageFrame& b);

// Single-scale SSIM on the channel-mean luma, 11x11 Gaussian window with
// sigma 1.5, K1=0.01, K2=0.03, averaged over positions where the full
// window fits. Frames smaller than the window raise ConfigError.
double ssim(const ImageFrame& a, const ImageFrame& b);

// ICtCp coordinates of one PQ-coded BT.2020 pixel. Equal-channel grays have
// ct == cp == 0: the chroma matrix rows sum to zero.
struct ICtCp {
    double i, ct, cp;
};

ICtCp ictcp_pixel(double r_code, double g_code, double b_code);

// Mean color difference in ICtCp space, scaled by 720. Both frames must be
// PQ/BT.2020.
double delta_e_itp(const ImageFrame& a, const ImageFrame& b);

// Uniform 72-bin histogram over [0,1]; the last bin is right-closed. Bins
// count every channel sample, so the bin sum equals `total`.
struct Histogram72 {
    std::array<std::uint64_t, 72> bins{};
    std::uint64_t total = 0;
};

Histogram72 histogram72(const ImageFrame& frame);

// L1 distance between count-normalized histograms, in [0, 2].
double hist_distance(const Histogram72& a, const Histogram72& b);

} // namespace hdrtv
