#include "hdrtv/color.hpp"

#include <cmath>
#include <string>

namespace hdrtv {

namespace {

// ST-2084 constants.
constexpr double kPqM1 = 2610.0 / 16384.0;
constexpr double kPqM2 = 2523.0 / 4096.0 * 128.0;
constexpr double kPqC1 = 3424.0 / 4096.0;
constexpr double kPqC2 = 2413.0 / 4096.0 * 32.0;
constexpr double kPqC3 = 2392.0 / 4096.0 * 32.0;
constexpr double kPqPeakNits = 10000.0;

constexpr double kSdrGamma = 2.4;

void require_transfer(const ImageFrame& frame, Transfer expected, const char* op) {
    if (frame.transfer() != expected)
        throw StateError(std::string(op) + ": expected " + to_string(expected) +
                         " input, got " + to_string(frame.transfer()));
}

Tensor map_channels(const Tensor& in, double (*fn)(double)) {
    Tensor out(in.channels(), in.height(), in.width());
    const auto src = in.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = static_cast<float>(fn(static_cast<double>(src[i])));
    return out;
}

struct Xy {
    double x, y;
};

struct Primaries {
    Xy r, g, b, white;
};

constexpr Primaries kBt709{{0.640, 0.330}, {0.300, 0.600}, {0.150, 0.060}, {0.3127, 0.3290}};
constexpr Primaries kBt2020{{0.708, 0.292}, {0.170, 0.797}, {0.131, 0.046}, {0.3127, 0.3290}};

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                r.m[i][j] += a.m[i][k] * b.m[k][j];
    return r;
}

Mat3 invert(const Mat3& a) {
    const auto& m = a.m;
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Mat3 r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return r;
}

// RGB -> CIE XYZ from chromaticities, scaled so the white point maps to Y=1.
Mat3 rgb_to_xyz(const Primaries& p) {
    auto col = [](const Xy& c) {
        return std::array<double, 3>{c.x / c.y, 1.0, (1.0 - c.x - c.y) / c.y};
    };
    const auto r = col(p.r), g = col(p.g), b = col(p.b), w = col(p.white);

    Mat3 base;
    for (int i = 0; i < 3; ++i) {
        base.m[i][0] = r[i];
        base.m[i][1] = g[i];
        base.m[i][2] = b[i];
    }
    const Mat3 inv = invert(base);
    std::array<double, 3> scale{};
    for (int i = 0; i < 3; ++i)
        scale[i] = inv.m[i][0] * w[0] + inv.m[i][1] * w[1] + inv.m[i][2] * w[2];

    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.m[i][j] = base.m[i][j] * scale[j];
    return out;
}

Mat3 derive_gamut_matrix(const Primaries& from, const Primaries& to) {
    return multiply(invert(rgb_to_xyz(to)), rgb_to_xyz(from));
}

Mat3 identity_matrix() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
}

} // namespace

const char* to_string(Gamut g) {
    return g == Gamut::BT709 ? "BT.709" : "BT.2020";
}

const char* to_string(Transfer t) {
    switch (t) {
    case Transfer::SdrGamma: return "SDR-gamma";
    case Transfer::PQ: return "PQ";
    default: return "linear";
    }
}

ImageFrame::ImageFrame(Tensor pixels, Gamut gamut, Transfer transfer)
    : pixels_(clamp01(std::move(pixels))), gamut_(gamut), transfer_(transfer) {
    if (pixels_.channels() != 3)
        throw ShapeError("ImageFrame: expected 3 channels, got " +
                         std::to_string(pixels_.channels()));
    ensure_finite(pixels_, "ImageFrame");
}

Mask::Mask(Tensor values) : values_(clamp01(std::move(values))) {
    if (values_.channels() != 1)
        throw ShapeError("Mask: expected 1 channel, got " +
                         std::to_string(values_.channels()));
    ensure_finite(values_, "Mask");
}

double sdr_eotf_scalar(double v) {
    return std::pow(v, kSdrGamma);
}

double sdr_oetf_scalar(double v) {
    return std::pow(v, 1.0 / kSdrGamma);
}

double pq_eotf_scalar(double code) {
    if (code <= 0.0)
        return 0.0;
    const double p = std::pow(code, 1.0 / kPqM2);
    const double num = p - kPqC1;
    if (num <= 0.0)
        return 0.0;
    const double den = kPqC2 - kPqC3 * p;
    return kPqPeakNits * std::pow(num / den, 1.0 / kPqM1);
}

double pq_oetf_scalar(double nits) {
    double y = nits / kPqPeakNits;
    y = y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
    const double yp = std::pow(y, kPqM1);
    return std::pow((kPqC1 + kPqC2 * yp) / (1.0 + kPqC3 * yp), kPqM2);
}

ImageFrame sdr_eotf(const ImageFrame& frame) {
    require_transfer(frame, Transfer::SdrGamma, "sdr_eotf");
    return ImageFrame(map_channels(frame.pixels(), &sdr_eotf_scalar),
                      frame.gamut(), Transfer::Linear);
}

ImageFrame sdr_oetf(const ImageFrame& frame) {
    require_transfer(frame, Transfer::Linear, "sdr_oetf");
    return ImageFrame(map_channels(frame.pixels(), &sdr_oetf_scalar),
                      frame.gamut(), Transfer::SdrGamma);
}

Tensor pq_eotf(const ImageFrame& frame) {
    require_transfer(frame, Transfer::PQ, "pq_eotf");
    Tensor nits = map_channels(frame.pixels(), &pq_eotf_scalar);
    ensure_finite(nits, "pq_eotf");
    return nits;
}

ImageFrame pq_oetf(const Tensor& nits, Gamut gamut) {
    if (nits.channels() != 3)
        throw ShapeError("pq_oetf: expected 3 channels");
    return ImageFrame(map_channels(nits, &pq_oetf_scalar), gamut, Transfer::PQ);
}

const Mat3& gamut_matrix(Gamut from, Gamut to) {
    static const Mat3 kIdentity = identity_matrix();
    static const Mat3 k709To2020 = derive_gamut_matrix(kBt709, kBt2020);
    static const Mat3 k2020To709 = derive_gamut_matrix(kBt2020, kBt709);
    if (from == to)
        return kIdentity;
    return from == Gamut::BT709 ? k709To2020 : k2020To709;
}

ImageFrame gamut_convert(const ImageFrame& frame, Gamut target) {
    if (frame.gamut() == target)
        return frame;
    require_transfer(frame, Transfer::Linear, "gamut_convert");

    const Mat3& m = gamut_matrix(frame.gamut(), target);
    const Tensor& in = frame.pixels();
    Tensor out(3, in.height(), in.width());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            const double r = in(0, y, x), g = in(1, y, x), b = in(2, y, x);
            for (int i = 0; i < 3; ++i) {
                const double v = m.m[i][0] * r + m.m[i][1] * g + m.m[i][2] * b;
                out(i, y, x) = static_cast<float>(v < 0.0 ? 0.0 : v);
            }
        }
    }
    return ImageFrame(std::move(out), target, Transfer::Linear);
}

std::uint16_t quantize_value(float v, int bits) {
    const int maxv = (1 << bits) - 1;
    float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return static_cast<std::uint16_t>(std::lround(static_cast<double>(c) * maxv));
}

float dequantize_value(std::uint16_t code, int bits) {
    return static_cast<float>(code) / static_cast<float>((1 << bits) - 1);
}

QuantizedImage quantize(const ImageFrame& frame, int bits) {
    if (bits != 8 && bits != 16)
        throw ConfigError("quantize: bits must be 8 or 16");
    QuantizedImage q;
    q.bits = bits;
    q.height = frame.height();
    q.width = frame.width();
    q.gamut = frame.gamut();
    q.transfer = frame.transfer();
    q.codes.resize(frame.pixels().size());
    const auto src = frame.pixels().data();
    for (std::size_t i = 0; i < src.size(); ++i)
        q.codes[i] = quantize_value(src[i], bits);
    return q;
}

ImageFrame dequantize(const QuantizedImage& image) {
    if (image.bits != 8 && image.bits != 16)
        throw ConfigError("dequantize: bits must be 8 or 16");
    if (image.codes.size() != static_cast<std::size_t>(3) * image.height * image.width)
        throw ShapeError("dequantize: code count does not match dimensions");
    Tensor t(3, image.height, image.width);
    auto dst = t.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = dequantize_value(image.codes[i], image.bits);
    return ImageFrame(std::move(t), image.gamut, image.transfer);
}

Mask overexposure_mask(const ImageFrame& sdr, float tau, float ramp) {
    if (!(tau > 0.0f && tau < 1.0f))
        throw ConfigError("overexposure_mask: tau must lie in (0,1)");
    if (!(ramp > 0.0f))
        throw ConfigError("overexposure_mask: ramp must be positive");
    if (static_cast<double>(tau) + ramp > 1.0 + 1e-9)
        throw ConfigError("overexposure_mask: tau + ramp must not exceed 1");
    require_transfer(sdr, Transfer::SdrGamma, "overexposure_mask");

    const Tensor& p = sdr.pixels();
    Tensor m(1, p.height(), p.width());
    for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) {
            const float peak = std::max(p(0, y, x), std::max(p(1, y, x), p(2, y, x)));
            m(0, y, x) = (peak - tau) / ramp;
        }
    }
    return Mask(std::move(m)); // Mask construction clamps to [0,1]
}

} // namespace hdrtv
