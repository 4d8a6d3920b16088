#include <doctest.h>

#include <cmath>

#include "hdrtv/color.hpp"
#include "test_util.hpp"

using namespace hdrtv;
using namespace hdrtv::test;

TEST_CASE("ImageFrame clamps on construction and requires 3 channels") {
    Tensor t(3, 1, 1);
    t(0, 0, 0) = -0.5f;
    t(1, 0, 0) = 1.5f;
    t(2, 0, 0) = 0.25f;
    const ImageFrame f(std::move(t), Gamut::BT709, Transfer::SdrGamma);
    CHECK(f.pixels()(0, 0, 0) == 0.0f);
    CHECK(f.pixels()(1, 0, 0) == 1.0f);
    CHECK(f.pixels()(2, 0, 0) == 0.25f);
    CHECK_THROWS_AS(ImageFrame(Tensor(1, 1, 1), Gamut::BT709, Transfer::SdrGamma),
                    ShapeError);
    CHECK_THROWS_AS(Mask(Tensor(3, 1, 1)), ShapeError);
}

TEST_CASE("sdr transfer: endpoints, the 0.5 anchor, and the wrong-tag error") {
    CHECK(sdr_eotf_scalar(0.0) == 0.0);
    CHECK(sdr_eotf_scalar(1.0) == 1.0);
    CHECK(sdr_eotf_scalar(0.5) == doctest::Approx(0.18946457).epsilon(1e-6));

    const ImageFrame linear(Tensor::full(3, 2, 2, 0.5f), Gamut::BT709, Transfer::Linear);
    CHECK_THROWS_AS(sdr_eotf(linear), StateError);
    const ImageFrame coded(Tensor::full(3, 2, 2, 0.5f), Gamut::BT709, Transfer::SdrGamma);
    CHECK_THROWS_AS(sdr_oetf(coded), StateError);
    const ImageFrame lin = sdr_eotf(coded);
    CHECK(lin.transfer() == Transfer::Linear);
    CHECK(lin.pixels()(0, 0, 0) == doctest::Approx(0.18946457));
}

TEST_CASE("sdr transfer round-trips within 1e-6 on a 10001-point grid") {
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double v = i / 10000.0;
        worst = std::max(worst, std::abs(sdr_oetf_scalar(sdr_eotf_scalar(v)) - v));
    }
    CHECK(worst <= 1e-6);
    for (double v : {0.0, 0.25, 1.0})
        CHECK(sdr_oetf_scalar(sdr_eotf_scalar(v)) == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("pq transfer: endpoints and the closed-form inverse") {
    CHECK(pq_eotf_scalar(0.0) == 0.0);
    CHECK(std::abs(pq_eotf_scalar(1.0) - 10000.0) <= 1e-3);
    // inverse anchors at 0, 100 and 10000 nits
    CHECK(pq_oetf_scalar(0.0) == doctest::Approx(7.3095590257e-7).epsilon(1e-6));
    CHECK(pq_oetf_scalar(100.0) == doctest::Approx(0.50807842).epsilon(1e-7));
    CHECK(pq_oetf_scalar(10000.0) == doctest::Approx(1.0));
    CHECK(pq_oetf_scalar(20000.0) == doctest::Approx(1.0)); // clamps, no error

    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double v = i / 10000.0;
        worst = std::max(worst, std::abs(pq_oetf_scalar(pq_eotf_scalar(v)) - v));
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("pq frame ops check tags and report nits") {
    const ImageFrame pq(Tensor::full(3, 2, 2, 1.0f), Gamut::BT2020, Transfer::PQ);
    const Tensor nits = pq_eotf(pq);
    CHECK(nits(0, 0, 0) == doctest::Approx(10000.0));
    const ImageFrame sdr(Tensor::full(3, 2, 2, 1.0f), Gamut::BT709, Transfer::SdrGamma);
    CHECK_THROWS_AS(pq_eotf(sdr), StateError);

    const ImageFrame back = pq_oetf(nits, Gamut::BT2020);
    CHECK(back.transfer() == Transfer::PQ);
    CHECK(back.pixels()(0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("transfer functions are strictly monotone on [0,1]") {
    double prev_sdr = -1.0, prev_pq_o = -1.0, prev_pq_e = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double v = i / 10000.0;
        const double s = sdr_eotf_scalar(v);
        const double po = pq_oetf_scalar(v * 10000.0);
        const double pe = pq_eotf_scalar(v);
        CHECK(s > prev_sdr);
        CHECK(po > prev_pq_o);
        if (i > 0)
            CHECK(pe > prev_pq_e); // EOTF is flat-zero only at the origin
        prev_sdr = s;
        prev_pq_o = po;
        prev_pq_e = pe;
    }
}

TEST_CASE("gamut matrices: white preservation, inverse pair, frozen red anchor") {
    const Mat3& fwd = gamut_matrix(Gamut::BT709, Gamut::BT2020);
    const Mat3& rev = gamut_matrix(Gamut::BT2020, Gamut::BT709);
    for (int i = 0; i < 3; ++i) {
        double row_f = 0.0, row_r = 0.0;
        for (int j = 0; j < 3; ++j) {
            row_f += fwd.m[i][j];
            row_r += rev.m[i][j];
            double prod = 0.0;
            for (int k = 0; k < 3; ++k)
                prod += fwd.m[i][k] * rev.m[k][j];
            CHECK(std::abs(prod - (i == j ? 1.0 : 0.0)) <= 1e-6);
        }
        CHECK(std::abs(row_f - 1.0) <= 1e-6);
        CHECK(std::abs(row_r - 1.0) <= 1e-6);
    }
    // pure BT.709 red in BT.2020, against an independent derivation
    CHECK(fwd.m[0][0] == doctest::Approx(0.6274038959).epsilon(1e-9));
    CHECK(fwd.m[1][0] == doctest::Approx(0.0690972894).epsilon(1e-9));
    CHECK(fwd.m[2][0] == doctest::Approx(0.0163914389).epsilon(1e-9));
}

TEST_CASE("gamut_convert: identity on same gamut, white fixed, round trip") {
    Xorshift64Star rng(5);
    const ImageFrame white(Tensor::full(3, 1, 1, 1.0f), Gamut::BT709, Transfer::Linear);
    const ImageFrame w2020 = gamut_convert(white, Gamut::BT2020);
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(w2020.pixels()(c, 0, 0) - 1.0f) <= 1e-6f);

    const ImageFrame same = gamut_convert(white, Gamut::BT709);
    CHECK(bit_equal(same.pixels(), white.pixels()));

    const ImageFrame coded(Tensor::full(3, 1, 1, 0.5f), Gamut::BT709, Transfer::SdrGamma);
    CHECK_THROWS_AS(gamut_convert(coded, Gamut::BT2020), StateError);

    // 1000 random pixels survive 709 -> 2020 -> 709 within 1e-5
    const Tensor px = random_tensor(rng, 3, 25, 40, 0.0f, 1.0f);
    const ImageFrame f(px, Gamut::BT709, Transfer::Linear);
    const ImageFrame back = gamut_convert(gamut_convert(f, Gamut::BT2020), Gamut::BT709);
    CHECK(max_abs_diff(back.pixels(), f.pixels()) <= 1e-5);

    const ImageFrame red = [&] {
        Tensor t(3, 1, 1);
        t(0, 0, 0) = 1.0f;
        return ImageFrame(std::move(t), Gamut::BT709, Transfer::Linear);
    }();
    const ImageFrame red2020 = gamut_convert(red, Gamut::BT2020);
    CHECK(red2020.pixels()(0, 0, 0) == doctest::Approx(0.6274038959).epsilon(1e-6));
    CHECK(red2020.pixels()(1, 0, 0) == doctest::Approx(0.0690972894).epsilon(1e-6));
    CHECK(red2020.pixels()(2, 0, 0) == doctest::Approx(0.0163914389).epsilon(1e-6));
}

TEST_CASE("quantize: anchors, rounding rule, round-trip bound") {
    CHECK(quantize_value(1.0f, 16) == 65535);
    CHECK(quantize_value(0.5f, 8) == 128); // round half away from zero
    CHECK(quantize_value(0.0f, 8) == 0);
    CHECK_THROWS_AS(quantize(ImageFrame(Tensor(3, 1, 1), Gamut::BT709, Transfer::SdrGamma), 12),
                    ConfigError);

    for (int bits : {8, 16}) {
        double worst = 0.0;
        // half-a-code bound, plus a float32 ulp of representation slack
        const double bound = 0.5 / ((1 << bits) - 1) + 1e-7;
        for (int i = 0; i <= 10000; ++i) {
            const float v = static_cast<float>(i) / 10000.0f;
            worst = std::max(worst, std::abs(static_cast<double>(dequantize_value(
                                                 quantize_value(v, bits), bits)) - v));
        }
        CHECK(worst <= bound);
    }

    Xorshift64Star rng(6);
    const ImageFrame f = random_sdr_frame(rng, 4, 4);
    const QuantizedImage q = quantize(f, 16);
    const ImageFrame back = dequantize(q);
    CHECK(back.transfer() == f.transfer());
    CHECK(max_abs_diff(back.pixels(), f.pixels()) <= 0.5 / 65535.0 + 1e-7);
}

TEST_CASE("overexposure_mask: anchors, validation, monotonicity") {
    auto frame_of = [](float r, float g, float b) {
        Tensor t(3, 1, 1);
        t(0, 0, 0) = r;
        t(1, 0, 0) = g;
        t(2, 0, 0) = b;
        return ImageFrame(std::move(t), Gamut::BT709, Transfer::SdrGamma);
    };
    CHECK(overexposure_mask(frame_of(0, 0, 0)).values()(0, 0, 0) == 0.0f);
    CHECK(overexposure_mask(frame_of(1, 1, 1)).values()(0, 0, 0) == 1.0f);
    CHECK(overexposure_mask(frame_of(0.975f, 0.1f, 0.1f)).values()(0, 0, 0) ==
          doctest::Approx(0.5).epsilon(1e-6));

    CHECK_THROWS_AS(overexposure_mask(frame_of(0, 0, 0), 0.0f, 0.05f), ConfigError);
    CHECK_THROWS_AS(overexposure_mask(frame_of(0, 0, 0), 1.5f, 0.05f), ConfigError);
    CHECK_THROWS_AS(overexposure_mask(frame_of(0, 0, 0), 0.95f, 0.0f), ConfigError);
    CHECK_THROWS_AS(overexposure_mask(frame_of(0, 0, 0), 0.95f, 0.1f), ConfigError);

    const ImageFrame linear(Tensor(3, 1, 1), Gamut::BT709, Transfer::Linear);
    CHECK_THROWS_AS(overexposure_mask(linear), StateError);

    float prev = -1.0f;
    for (int i = 0; i <= 200; ++i) {
        const float m = overexposure_mask(frame_of(i / 200.0f, 0, 0)).values()(0, 0, 0);
        CHECK(m >= prev);
        prev = m;
    }
}
