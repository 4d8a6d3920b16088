#include "hdrtv/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hdrtv {

namespace {

void require_comparable(const ImageFrame& a, const ImageFrame& b, const char* op) {
    if (a.height() != b.height() || a.width() != b.width())
        throw ShapeError(std::string(op) + ": frame dims differ");
    if (a.transfer() != b.transfer())
        throw ShapeError(std::string(op) + ": frames carry different transfer tags");
}

std::vector<double> luma(const ImageFrame& f) {
    const Tensor& p = f.pixels();
    std::vector<double> out(static_cast<std::size_t>(p.height()) * p.width());
    std::size_t i = 0;
    for (int y = 0; y < p.height(); ++y)
        for (int x = 0; x < p.width(); ++x, ++i)
            out[i] = (static_cast<double>(p(0, y, x)) + p(1, y, x) + p(2, y, x)) / 3.0;
    return out;
}

// BT.2124: linear RGB -> LMS, and PQ-coded L'M'S' -> ICtCp chroma rows.
constexpr double kLmsFromRgb[3][3] = {
    {1688.0 / 4096.0, 2146.0 / 4096.0, 262.0 / 4096.0},
    {683.0 / 4096.0, 2951.0 / 4096.0, 462.0 / 4096.0},
    {99.0 / 4096.0, 309.0 / 4096.0, 3688.0 / 4096.0},
};
constexpr double kCtRow[3] = {6610.0 / 4096.0, -13613.0 / 4096.0, 7003.0 / 4096.0};
constexpr double kCpRow[3] = {17933.0 / 4096.0, -17390.0 / 4096.0, -543.0 / 4096.0};

struct Itp {
    double i, t, p;
};

Itp pixel_itp(float r_code, float g_code, float b_code) {
    const ICtCp c = ictcp_pixel(r_code, g_code, b_code);
    return {c.i, 0.5 * c.ct, c.cp}; // ITP halves the Ct axis
}

} // namespace

ICtCp ictcp_pixel(double r_code, double g_code, double b_code) {
    // PQ decode to normalized linear light (1.0 = 10000 nits).
    const double r = pq_eotf_scalar(r_code) / 10000.0;
    const double g = pq_eotf_scalar(g_code) / 10000.0;
    const double b = pq_eotf_scalar(b_code) / 10000.0;

    double lms[3];
    for (int row = 0; row < 3; ++row)
        lms[row] = kLmsFromRgb[row][0] * r + kLmsFromRgb[row][1] * g +
                   kLmsFromRgb[row][2] * b;

    double coded[3];
    for (int row = 0; row < 3; ++row)
        coded[row] = pq_oetf_scalar(lms[row] * 10000.0);

    ICtCp out;
    out.i = 0.5 * (coded[0] + coded[1]);
    out.ct = kCtRow[0] * coded[0] + kCtRow[1] * coded[1] + kCtRow[2] * coded[2];
    out.cp = kCpRow[0] * coded[0] + kCpRow[1] * coded[1] + kCpRow[2] * coded[2];
    return out;
}

double psnr(const ImageFrame& a, const ImageFrame& b) {
    require_comparable(a, b, "psnr");
    const auto pa = a.pixels().data();
    const auto pb = b.pixels().data();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = static_cast<double>(pa[i]) - pb[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(pa.size());
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageFrame& a, const ImageFrame& b) {
    require_comparable(a, b, "ssim");
    constexpr int kWindow = 11;
    constexpr int kRadius = kWindow / 2;
    constexpr double kSigma = 1.5;
    constexpr double kC1 = 0.01 * 0.01; // (K1*L)^2 with L = 1
    constexpr double kC2 = 0.03 * 0.03;

    const int h = a.height();
    const int w = a.width();
    if (h < kWindow || w < kWindow)
        throw ConfigError("ssim: frame smaller than the 11x11 window");

    static const std::array<std::array<double, kWindow>, kWindow> kernel = [] {
        std::array<std::array<double, kWindow>, kWindow> k{};
        double sum = 0.0;
        for (int i = 0; i < kWindow; ++i)
            for (int j = 0; j < kWindow; ++j) {
                const double dy = i - kRadius, dx = j - kRadius;
                k[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * kSigma * kSigma));
                sum += k[i][j];
            }
        for (auto& row : k)
            for (auto& v : row)
                v /= sum;
        return k;
    }();

    const std::vector<double> la = luma(a);
    const std::vector<double> lb = luma(b);

    double total = 0.0;
    std::size_t count = 0;
    for (int cy = kRadius; cy < h - kRadius; ++cy) {
        for (int cx = kRadius; cx < w - kRadius; ++cx) {
            double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
            for (int i = 0; i < kWindow; ++i) {
                const std::size_t row = static_cast<std::size_t>(cy - kRadius + i) * w;
                for (int j = 0; j < kWindow; ++j) {
                    const double g = kernel[i][j];
                    const double va = la[row + cx - kRadius + j];
                    const double vb = lb[row + cx - kRadius + j];
                    mx += g * va;
                    my += g * vb;
                    xx += g * va * va;
                    yy += g * vb * vb;
                    xy += g * va * vb;
                }
            }
            const double sx = xx - mx * mx;
            const double sy = yy - my * my;
            const double sxy = xy - mx * my;
            total += ((2.0 * mx * my + kC1) * (2.0 * sxy + kC2)) /
                     ((mx * mx + my * my + kC1) * (sx + sy + kC2));
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double delta_e_itp(const ImageFrame& a, const ImageFrame& b) {
    if (a.transfer() != Transfer::PQ || b.transfer() != Transfer::PQ ||
        a.gamut() != Gamut::BT2020 || b.gamut() != Gamut::BT2020)
        throw StateError("delta_e_itp: both frames must be PQ/BT.2020");
    if (a.height() != b.height() || a.width() != b.width())
        throw ShapeError("delta_e_itp: frame dims differ");

    const Tensor& pa = a.pixels();
    const Tensor& pb = b.pixels();
    double sum = 0.0;
    for (int y = 0; y < pa.height(); ++y) {
        for (int x = 0; x < pa.width(); ++x) {
            const Itp ia = pixel_itp(pa(0, y, x), pa(1, y, x), pa(2, y, x));
            const Itp ib = pixel_itp(pb(0, y, x), pb(1, y, x), pb(2, y, x));
            const double di = ia.i - ib.i;
            const double dt = ia.t - ib.t;
            const double dp = ia.p - ib.p;
            sum += 720.0 * std::sqrt(di * di + dt * dt + dp * dp);
        }
    }
    return sum / (static_cast<double>(pa.height()) * pa.width());
}

Histogram72 histogram72(const ImageFrame& frame) {
    Histogram72 h;
    for (float v : frame.pixels().data()) {
        int bin = static_cast<int>(v * 72.0f);
        if (bin > 71)
            bin = 71; // v == 1.0 falls in the right-closed last bin
        ++h.bins[bin];
        ++h.total;
    }
    return h;
}

double hist_distance(const Histogram72& a, const Histogram72& b) {
    if (a.total == 0 || b.total == 0)
        throw ConfigError("hist_distance: empty histogram");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.bins.size(); ++i)
        sum += std::abs(static_cast<double>(a.bins[i]) / a.total -
                        static_cast<double>(b.bins[i]) / b.total);
    return sum;
}

} // namespace hdrtv
