#include <doctest.h>

#include <cmath>
#include <vector>

#include "hdrtv/tensor.hpp"
#include "test_util.hpp"

using namespace hdrtv;
using namespace hdrtv::test;

namespace {

// Independent straight-loop reference for conv2d: explicit padding lookup,
// no shared code with the implementation.
Tensor reference_conv2d(const Tensor& in, const ConvParams& p) {
    const int pad = p.k / 2;
    const int oh = p.stride == 1 ? in.height() : (in.height() + 1) / 2;
    const int ow = p.stride == 1 ? in.width() : (in.width() + 1) / 2;
    auto sample = [&](int c, int y, int x) {
        y = std::max(0, std::min(y, in.height() - 1));
        x = std::max(0, std::min(x, in.width() - 1));
        return in(c, y, x);
    };
    Tensor out(p.out_ch, oh, ow);
    for (int oc = 0; oc < p.out_ch; ++oc)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                float acc = p.bias[oc];
                for (int ic = 0; ic < p.in_ch; ++ic)
                    for (int u = 0; u < p.k; ++u)
                        for (int v = 0; v < p.k; ++v)
                            acc += p.weight[((oc * p.in_ch + ic) * p.k + u) * p.k + v] *
                                   sample(ic, oy * p.stride + u - pad,
                                          ox * p.stride + v - pad);
                out(oc, oy, ox) = acc;
            }
    return out;
}

// Scalar bilinear evaluation at one output location, align-corners-false.
float reference_bilinear_at(const Tensor& in, int c, int oy, int ox, int factor) {
    auto sample = [&](int y, int x) {
        y = std::max(0, std::min(y, in.height() - 1));
        x = std::max(0, std::min(x, in.width() - 1));
        return static_cast<double>(in(c, y, x));
    };
    const double sy = (oy + 0.5) / factor - 0.5;
    const double sx = (ox + 0.5) / factor - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const int x0 = static_cast<int>(std::floor(sx));
    const double fy = sy - y0;
    const double fx = sx - x0;
    const double top = sample(y0, x0) * (1 - fx) + sample(y0, x0 + 1) * fx;
    const double bot = sample(y0 + 1, x0) * (1 - fx) + sample(y0 + 1, x0 + 1) * fx;
    return static_cast<float>(top * (1 - fy) + bot * fy);
}

} // namespace

TEST_CASE("conv2d: center-delta kernel is the exact identity") {
    Xorshift64Star rng(1);
    const Tensor in = random_tensor(rng, 3, 6, 5, -2.0f, 2.0f);
    std::vector<float> w(3 * 3 * 9, 0.0f);
    for (int c = 0; c < 3; ++c)
        w[(c * 3 + c) * 9 + 4] = 1.0f;
    const std::vector<float> b(3, 0.0f);
    const Tensor out = conv2d(in, {w, b, 3, 3, 3, 1});
    CHECK(bit_equal(out, in));
}

TEST_CASE("conv2d: 1x1 identity kernel leaves values unchanged") {
    Tensor in(1, 2, 2);
    in(0, 0, 0) = 1;
    in(0, 0, 1) = 2;
    in(0, 1, 0) = 3;
    in(0, 1, 1) = 4;
    const std::vector<float> w{1.0f};
    const std::vector<float> b{0.0f};
    const Tensor out = conv2d(in, {w, b, 1, 1, 1, 1});
    CHECK(bit_equal(out, in));
}

TEST_CASE("conv2d matches the straight-loop reference on 100 seeded cases") {
    double worst = 0.0;
    for (int seed = 1; seed <= 100; ++seed) {
        Xorshift64Star rng(seed);
        const int ci = 1 + static_cast<int>(rng.next() % 5);
        const int co = 1 + static_cast<int>(rng.next() % 8);
        const int h = 3 + static_cast<int>(rng.next() % 8);
        const int w = 3 + static_cast<int>(rng.next() % 8);
        const int k = 1 + 2 * static_cast<int>(rng.next() % 3); // 1, 3, 5
        const int stride = 1 + static_cast<int>(rng.next() % 2);
        const Tensor in = random_tensor(rng, ci, h, w);
        std::vector<float> weight(static_cast<std::size_t>(co) * ci * k * k);
        std::vector<float> bias(co);
        for (auto& v : weight)
            v = rng.uniform_pm_half();
        for (auto& v : bias)
            v = rng.uniform_pm_half();
        const ConvParams p{weight, bias, co, ci, k, stride};
        worst = std::max(worst, max_abs_diff(conv2d(in, p), reference_conv2d(in, p)));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("conv2d: the spec'd 4x8x8 -> 8 channel case matches the reference") {
    Xorshift64Star rng(7);
    const Tensor in = random_tensor(rng, 4, 8, 8);
    std::vector<float> weight(8 * 4 * 9);
    std::vector<float> bias(8);
    for (auto& v : weight)
        v = rng.uniform_pm_half();
    for (auto& v : bias)
        v = rng.uniform_pm_half();
    const ConvParams p{weight, bias, 8, 4, 3, 1};
    CHECK(max_abs_diff(conv2d(in, p), reference_conv2d(in, p)) <= 1e-5);
}

TEST_CASE("conv2d: stride-2 output dims are ceil(H/2) x ceil(W/2)") {
    const std::vector<float> w(9, 0.1f);
    const std::vector<float> b(1, 0.0f);
    const Tensor in(1, 7, 10);
    const Tensor out = conv2d(in, {w, b, 1, 1, 3, 2});
    CHECK(out.height() == 4);
    CHECK(out.width() == 5);
}

TEST_CASE("conv2d rejects mismatched channels and bad geometry") {
    const std::vector<float> w(9, 0.0f);
    const std::vector<float> b(1, 0.0f);
    const Tensor in(2, 4, 4);
    CHECK_THROWS_AS(conv2d(in, {w, b, 1, 1, 3, 1}), ShapeError);
    const Tensor one(1, 4, 4);
    CHECK_THROWS_AS(conv2d(one, {w, b, 1, 1, 3, 3}), ShapeError); // bad stride
    const std::vector<float> w2(4, 0.0f);
    CHECK_THROWS_AS(conv2d(one, {w2, b, 1, 1, 2, 1}), ShapeError); // even k
}

TEST_CASE("bilinear_upsample: factor 1 is a no-op, constants stay constant") {
    Xorshift64Star rng(2);
    const Tensor in = random_tensor(rng, 2, 5, 4);
    CHECK(bit_equal(bilinear_upsample(in, 1), in));

    const Tensor c = Tensor::full(1, 3, 3, 0.7f);
    const Tensor up = bilinear_upsample(c, 4);
    CHECK(up.height() == 12);
    for (float v : up.data())
        CHECK(std::abs(v - 0.7f) <= 1e-6f);
}

TEST_CASE("bilinear_upsample matches the scalar formula on the 2x2 checker") {
    Tensor in(1, 2, 2);
    in(0, 0, 1) = 1.0f;
    in(0, 1, 0) = 1.0f;
    const Tensor out = bilinear_upsample(in, 2);
    REQUIRE(out.height() == 4);
    REQUIRE(out.width() == 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            CHECK(out(0, y, x) ==
                  doctest::Approx(reference_bilinear_at(in, 0, y, x, 2)).epsilon(1e-6));
    // a few hand anchors of the same grid
    CHECK(out(0, 0, 0) == doctest::Approx(0.0));
    CHECK(out(0, 1, 1) == doctest::Approx(0.375));
    CHECK(out(0, 0, 3) == doctest::Approx(1.0));
    CHECK(out(0, 2, 2) == doctest::Approx(0.375));
}

TEST_CASE("bilinear_upsample matches the scalar formula on random fields") {
    Xorshift64Star rng(3);
    for (int factor : {2, 3, 4}) {
        const Tensor in = random_tensor(rng, 2, 4, 5);
        const Tensor out = bilinear_upsample(in, factor);
        for (int c = 0; c < 2; ++c)
            for (int y = 0; y < out.height(); ++y)
                for (int x = 0; x < out.width(); ++x)
                    CHECK(std::abs(out(c, y, x) -
                                   reference_bilinear_at(in, c, y, x, factor)) <= 1e-6f);
    }
}

TEST_CASE("conv2d: mirroring input and kernel mirrors the output") {
    // Cross-correlation with replicate padding commutes with a horizontal
    // flip when the kernel support is flipped with it (stride 1 only: the
    // stride-2 sampling grid has no mirror-symmetric phase on even widths).
    Xorshift64Star rng(8);
    const int ci = 3, co = 4, k = 3;
    const Tensor in = random_tensor(rng, ci, 6, 9);
    std::vector<float> weight(co * ci * k * k);
    std::vector<float> bias(co);
    for (auto& v : weight)
        v = rng.uniform_pm_half();
    for (auto& v : bias)
        v = rng.uniform_pm_half();
    std::vector<float> mirrored(weight.size());
    for (int oc = 0; oc < co; ++oc)
        for (int ic = 0; ic < ci; ++ic)
            for (int u = 0; u < k; ++u)
                for (int v = 0; v < k; ++v)
                    mirrored[((oc * ci + ic) * k + u) * k + v] =
                        weight[((oc * ci + ic) * k + u) * k + (k - 1 - v)];

    const Tensor direct = conv2d(in, {weight, bias, co, ci, k, 1});
    const Tensor flipped =
        flip_horizontal(conv2d(flip_horizontal(in), {mirrored, bias, co, ci, k, 1}));
    CHECK(max_abs_diff(direct, flipped) <= 1e-6);
}

TEST_CASE("global_avg_pool: constants, the 2x2 mean, and the output shape") {
    const Tensor c = Tensor::full(4, 6, 3, 0.3f);
    const Tensor pooled = global_avg_pool(c);
    CHECK(pooled.channels() == 4);
    CHECK(pooled.height() == 1);
    CHECK(pooled.width() == 1);
    for (float v : pooled.data())
        CHECK(std::abs(v - 0.3f) <= 1e-6f);

    Tensor quad(1, 2, 2);
    quad(0, 0, 0) = 1;
    quad(0, 0, 1) = 2;
    quad(0, 1, 0) = 3;
    quad(0, 1, 1) = 4;
    CHECK(global_avg_pool(quad)(0, 0, 0) == doctest::Approx(2.5));
}

TEST_CASE("softmax_spatial: uniformity, shift invariance, closed form") {
    const Tensor flat = Tensor::full(1, 4, 8, 0.25f);
    const Tensor s = softmax_spatial(flat);
    for (float v : s.data())
        CHECK(v == doctest::Approx(1.0 / 32.0));

    Xorshift64Star rng(4);
    const Tensor in = random_tensor(rng, 1, 5, 7, -3.0f, 3.0f);
    Tensor shifted = in;
    for (float& v : shifted.data())
        v += 5.0f;
    CHECK(max_abs_diff(softmax_spatial(in), softmax_spatial(shifted)) <= 1e-6);

    double sum = 0.0;
    const Tensor weights = softmax_spatial(in);
    for (float v : weights.data())
        sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-6);

    Tensor two(1, 1, 2);
    two(0, 0, 1) = std::log(3.0f);
    const Tensor st = softmax_spatial(two);
    CHECK(st(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(st(0, 0, 1) == doctest::Approx(0.75).epsilon(1e-6));

    CHECK_THROWS_AS(softmax_spatial(Tensor(2, 2, 2)), ShapeError);
}
