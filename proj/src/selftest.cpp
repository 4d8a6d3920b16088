#include "hdrtv/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hdrtv/color.hpp"
#include "hdrtv/dyct.hpp"
#include "hdrtv/hdcfm.hpp"
#include "hdrtv/metrics.hpp"
#include "hdrtv/modulation.hpp"
#include "hdrtv/pad.hpp"
#include "hdrtv/pdcg.hpp"
#include "hdrtv/pipeline.hpp"
#include "hdrtv/weights.hpp"

namespace hdrtv {

namespace {

struct Harness {
    std::ostream& out;
    int failures = 0;

    void check(const std::string& name, const std::function<bool(std::string&)>& fn) {
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (ok) {
            out << "ok   " << name;
            if (!detail.empty())
                out << "  (" << detail << ")";
            out << "\n";
        } else {
            out << "FAIL " << name << "  (" << detail << ")\n";
            ++failures;
        }
    }
};

Tensor random_tensor(Xorshift64Star& rng, int c, int h, int w, float lo, float hi) {
    Tensor t(c, h, w);
    for (float& v : t.data())
        v = lo + (rng.uniform_pm_half() + 0.5f) * (hi - lo);
    return t;
}

ImageFrame random_sdr_frame(Xorshift64Star& rng, int h, int w) {
    return ImageFrame(random_tensor(rng, 3, h, w, 0.0f, 1.0f), Gamut::BT709,
                      Transfer::SdrGamma);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    const auto pa = a.data();
    const auto pb = b.data();
    for (std::size_t i = 0; i < pa.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(pa[i]) - pb[i]));
    return m;
}

bool bit_equal(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        return false;
    const auto pa = a.data();
    const auto pb = b.data();
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (pa[i] != pb[i])
            return false;
    return true;
}

// Center-delta spatial kernels plus all-ones channel kernels: the exact
// identity configuration of the decoupled filter.
SpatialKernels delta_spatial(int h, int w, int k) {
    Tensor t(k * k, h, w);
    const int center = (k / 2) * k + k / 2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            t(center, y, x) = 1.0f;
    return {std::move(t), k};
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

} // namespace

int run_selftest(std::ostream& out) {
    Harness h{out};

    h.check("conv2d center-delta identity (exact)", [](std::string& d) {
        Xorshift64Star rng(11);
        const Tensor in = random_tensor(rng, 4, 9, 7, -2.0f, 2.0f);
        std::vector<float> w(4 * 4 * 9, 0.0f);
        for (int c = 0; c < 4; ++c)
            w[(c * 4 + c) * 9 + 4] = 1.0f;
        const std::vector<float> b(4, 0.0f);
        const Tensor outp = conv2d(in, {w, b, 4, 4, 3, 1});
        if (!bit_equal(outp, in)) {
            d = "identity kernel altered the input";
            return false;
        }
        return true;
    });

    h.check("bilinear/global-pool constancy (1e-6)", [](std::string& d) {
        const Tensor c = Tensor::full(3, 6, 5, 0.7f);
        const double e1 = max_abs_diff(bilinear_upsample(c, 4), Tensor::full(3, 24, 20, 0.7f));
        const double e2 = max_abs_diff(global_avg_pool(c), Tensor::full(3, 1, 1, 0.7f));
        d = "max err " + fmt(std::max(e1, e2));
        return e1 <= 1e-6 && e2 <= 1e-6;
    });

    h.check("softmax_spatial sum-to-one and shift invariance (1e-6)", [](std::string& d) {
        Xorshift64Star rng(12);
        const Tensor in = random_tensor(rng, 1, 8, 9, -3.0f, 3.0f);
        Tensor shifted = in;
        for (float& v : shifted.data())
            v += 5.0f;
        const Tensor s1 = softmax_spatial(in);
        const Tensor s2 = softmax_spatial(shifted);
        double sum = 0.0;
        for (float v : s1.data())
            sum += v;
        const double shift_err = max_abs_diff(s1, s2);
        d = "sum-1 " + fmt(std::abs(sum - 1.0)) + ", shift " + fmt(shift_err);
        return std::abs(sum - 1.0) <= 1e-6 && shift_err <= 1e-6;
    });

    h.check("transfer-function round trips on 10001-point grids (1e-5)", [](std::string& d) {
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double v = i / 10000.0;
            worst = std::max(worst, std::abs(sdr_oetf_scalar(sdr_eotf_scalar(v)) - v));
            worst = std::max(worst, std::abs(pq_oetf_scalar(pq_eotf_scalar(v)) - v));
        }
        d = "max err " + fmt(worst);
        return worst <= 1e-5;
    });

    h.check("transfer functions strictly monotone on [0,1]", [](std::string& d) {
        double prev_s = -1.0, prev_p = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double v = i / 10000.0;
            const double s = sdr_eotf_scalar(v);
            const double p = pq_oetf_scalar(v * 10000.0);
            if (s <= prev_s || p <= prev_p) {
                d = "not increasing at v=" + fmt(v);
                return false;
            }
            prev_s = s;
            prev_p = p;
        }
        return true;
    });

    h.check("pq_eotf(1.0) = 10000 nits (1e-3)", [](std::string& d) {
        const double nits = pq_eotf_scalar(1.0);
        d = fmt(nits);
        return std::abs(nits - 10000.0) <= 1e-3;
    });

    h.check("gamut matrices: inverse pair and unit row sums (1e-6)", [](std::string& d) {
        const Mat3& f = gamut_matrix(Gamut::BT709, Gamut::BT2020);
        const Mat3& r = gamut_matrix(Gamut::BT2020, Gamut::BT709);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i) {
            double row_f = 0.0, row_r = 0.0;
            for (int j = 0; j < 3; ++j) {
                double prod = 0.0;
                for (int k = 0; k < 3; ++k)
                    prod += f.m[i][k] * r.m[k][j];
                worst = std::max(worst, std::abs(prod - (i == j ? 1.0 : 0.0)));
                row_f += f.m[i][j];
                row_r += r.m[i][j];
            }
            worst = std::max(worst, std::abs(row_f - 1.0));
            worst = std::max(worst, std::abs(row_r - 1.0));
        }
        d = "max err " + fmt(worst);
        return worst <= 1e-6;
    });

    h.check("over-exposure mask anchors and monotonicity", [](std::string& d) {
        auto frame_of = [](float v) {
            return ImageFrame(Tensor::full(3, 1, 1, v), Gamut::BT709, Transfer::SdrGamma);
        };
        if (overexposure_mask(frame_of(0.0f)).values()(0, 0, 0) != 0.0f ||
            overexposure_mask(frame_of(1.0f)).values()(0, 0, 0) != 1.0f) {
            d = "endpoint anchors";
            return false;
        }
        const float mid = overexposure_mask(frame_of(0.975f)).values()(0, 0, 0);
        if (std::abs(mid - 0.5f) > 1e-6f) {
            d = "mask(0.975) = " + fmt(mid);
            return false;
        }
        float prev = -1.0f;
        for (int i = 0; i <= 100; ++i) {
            const float m = overexposure_mask(frame_of(i / 100.0f)).values()(0, 0, 0);
            if (m < prev) {
                d = "not monotone";
                return false;
            }
            prev = m;
        }
        return true;
    });

    h.check("hm_apply identity modulation (exact) and linearity (1e-5)", [](std::string& d) {
        Xorshift64Star rng(21);
        const Tensor f1 = random_tensor(rng, 6, 8, 8, -1.0f, 1.0f);
        const Tensor f2 = random_tensor(rng, 6, 8, 8, -1.0f, 1.0f);
        const ModulationSet id = identity_modulation(6, 8, 8);
        if (!bit_equal(hm_apply(f1, id), f1)) {
            d = "identity set is not the identity";
            return false;
        }
        ModulationSet m{random_tensor(rng, 6, 1, 1, -1.0f, 1.0f),
                        random_tensor(rng, 6, 1, 1, -1.0f, 1.0f),
                        random_tensor(rng, 6, 8, 8, -1.0f, 1.0f),
                        random_tensor(rng, 6, 8, 8, -1.0f, 1.0f)};
        const Tensor zero(6, 8, 8);
        const Tensor h0 = hm_apply(zero, m);
        Tensor combo(6, 8, 8);
        for (std::size_t i = 0; i < combo.data().size(); ++i)
            combo.data()[i] = 0.5f * f1.data()[i] + 2.0f * f2.data()[i];
        const Tensor lhs = hm_apply(combo, m);
        const Tensor r1 = hm_apply(f1, m);
        const Tensor r2 = hm_apply(f2, m);
        double worst = 0.0;
        for (std::size_t i = 0; i < lhs.data().size(); ++i) {
            const double expect = h0.data()[i] + 0.5 * (r1.data()[i] - h0.data()[i]) +
                                  2.0 * (r2.data()[i] - h0.data()[i]);
            worst = std::max(worst, std::abs(expect - lhs.data()[i]));
        }
        d = "linearity err " + fmt(worst);
        return worst <= 1e-5;
    });

    h.check("ddf identity kernels and zero annihilation (exact)", [](std::string& d) {
        Xorshift64Star rng(31);
        const Tensor f = random_tensor(rng, 5, 7, 6, -2.0f, 2.0f);
        const SpatialKernels ks = delta_spatial(7, 6, 3);
        const ChannelKernels unit{Tensor::full(5, 3, 3, 1.0f), 3};
        if (!bit_equal(ddf_apply(f, ks, unit), f)) {
            d = "delta x unit is not the identity";
            return false;
        }
        const ChannelKernels zero{Tensor(5, 3, 3), 3};
        const Tensor z = ddf_apply(f, ks, zero);
        for (float v : z.data())
            if (v != 0.0f) {
                d = "zero channel kernels leaked";
                return false;
            }
        return true;
    });

    h.check("ddf_apply vs ddf_oracle, 25 seeded cases (1e-4)", [](std::string& d) {
        double worst = 0.0;
        for (int seed = 1; seed <= 25; ++seed) {
            Xorshift64Star rng(seed);
            const int c = 1 + static_cast<int>(rng.next() % 8);
            const int hh = 4 + static_cast<int>(rng.next() % 13);
            const int ww = 4 + static_cast<int>(rng.next() % 13);
            const Tensor f = random_tensor(rng, c, hh, ww, -1.0f, 1.0f);
            const SpatialKernels ks{random_tensor(rng, 9, hh, ww, -1.0f, 1.0f), 3};
            const ChannelKernels kc{random_tensor(rng, c, 3, 3, -1.0f, 1.0f), 3};
            worst = std::max(worst, max_abs_diff(ddf_apply(f, ks, kc), ddf_oracle(f, ks, kc)));
        }
        d = "max |diff| " + fmt(worst);
        return worst <= 1e-4;
    });

    h.check("context block: uniform per-channel residual (1e-6)", [](std::string& d) {
        Xorshift64Star rng(41);
        ModelWeights w = seeded_weights(
            51, std::vector<WeightSpec>{{"t.cb.attn.weight", {1, 8, 1, 1}},
                                        {"t.cb.attn.bias", {1}},
                                        {"t.cb.fc0.weight", {2, 8, 1, 1}},
                                        {"t.cb.fc0.bias", {2}},
                                        {"t.cb.fc1.weight", {8, 2, 1, 1}},
                                        {"t.cb.fc1.bias", {8}}});
        const Tensor f = random_tensor(rng, 8, 6, 6, -1.0f, 1.0f);
        const Tensor o = context_block(f, w, "t.");
        double worst = 0.0;
        for (int c = 0; c < 8; ++c) {
            const float base = o(c, 0, 0) - f(c, 0, 0);
            for (int y = 0; y < 6; ++y)
                for (int x = 0; x < 6; ++x)
                    worst = std::max(worst,
                                     std::abs(static_cast<double>(o(c, y, x)) - f(c, y, x) - base));
        }
        d = "max spread " + fmt(worst);
        return worst <= 1e-6;
    });

    h.check("blend anchors, convexity envelope and idempotence (exact)", [](std::string& d) {
        Xorshift64Star rng(61);
        for (int trial = 0; trial < 1000; ++trial) {
            const ImageFrame raw(random_tensor(rng, 3, 4, 4, 0.0f, 1.0f), Gamut::BT2020,
                                 Transfer::PQ);
            const ImageFrame ref(random_tensor(rng, 3, 4, 4, 0.0f, 1.0f), Gamut::BT2020,
                                 Transfer::PQ);
            const Mask m(random_tensor(rng, 1, 4, 4, 0.0f, 1.0f));
            const ImageFrame blended = blend(raw, ref, m);
            for (int c = 0; c < 3; ++c)
                for (int y = 0; y < 4; ++y)
                    for (int x = 0; x < 4; ++x) {
                        const float v = blended.pixels()(c, y, x);
                        const float a = raw.pixels()(c, y, x);
                        const float b = ref.pixels()(c, y, x);
                        if (v < std::min(a, b) || v > std::max(a, b)) {
                            d = "outside envelope at trial " + std::to_string(trial);
                            return false;
                        }
                    }
            if (!bit_equal(blend(raw, raw, m).pixels(), raw.pixels())) {
                d = "not idempotent on equal inputs";
                return false;
            }
        }
        Xorshift64Star rng2(62);
        const ImageFrame raw(random_tensor(rng2, 3, 4, 4, 0.0f, 1.0f), Gamut::BT2020,
                             Transfer::PQ);
        const ImageFrame ref(random_tensor(rng2, 3, 4, 4, 0.0f, 1.0f), Gamut::BT2020,
                             Transfer::PQ);
        const Mask zeros(Tensor(1, 4, 4));
        const Mask ones(Tensor::full(1, 4, 4, 1.0f));
        if (!bit_equal(blend(raw, ref, zeros).pixels(), ref.pixels()) ||
            !bit_equal(blend(raw, ref, ones).pixels(), raw.pixels())) {
            d = "mask 0/1 anchors";
            return false;
        }
        return true;
    });

    h.check("metrics anchors (psnr/ssim/deitp/hist)", [](std::string& d) {
        Xorshift64Star rng(71);
        const ImageFrame a(random_tensor(rng, 3, 16, 16, 0.0f, 1.0f), Gamut::BT2020,
                           Transfer::PQ);
        if (!std::isinf(psnr(a, a))) {
            d = "psnr self not infinite";
            return false;
        }
        Tensor lo(3, 16, 16);
        Tensor hi = Tensor::full(3, 16, 16, 1.0f / 255.0f);
        const ImageFrame fa(std::move(lo), Gamut::BT2020, Transfer::PQ);
        const ImageFrame fb(std::move(hi), Gamut::BT2020, Transfer::PQ);
        const double one_code = psnr(fa, fb);
        if (std::abs(one_code - 20.0 * std::log10(255.0)) > 1e-3) {
            d = "1-code psnr " + fmt(one_code);
            return false;
        }
        if (std::abs(ssim(a, a) - 1.0) > 1e-9) {
            d = "ssim self";
            return false;
        }
        if (delta_e_itp(a, a) != 0.0) {
            d = "deitp self";
            return false;
        }
        const ImageFrame gray(Tensor::full(3, 4, 4, 0.6f), Gamut::BT2020, Transfer::PQ);
        const ImageFrame gray2(Tensor::full(3, 4, 4, 0.4f), Gamut::BT2020, Transfer::PQ);
        const double de = delta_e_itp(gray, gray2);
        // equal-channel gray differs only in intensity: deltaE = 720*|dI|
        const double expect = 720.0 * std::abs(0.6 - 0.4);
        if (std::abs(de - expect) > expect * 1e-3 + 1e-4) {
            d = "gray-axis deitp " + fmt(de) + " vs " + fmt(expect);
            return false;
        }
        const ImageFrame c1(Tensor::full(3, 8, 8, 0.1f), Gamut::BT2020, Transfer::PQ);
        const ImageFrame c2(Tensor::full(3, 8, 8, 0.9f), Gamut::BT2020, Transfer::PQ);
        if (hist_distance(histogram72(c1), histogram72(c2)) != 2.0) {
            d = "disjoint histograms";
            return false;
        }
        if (hist_distance(histogram72(a), histogram72(a)) != 0.0) {
            d = "self histogram distance";
            return false;
        }
        return true;
    });

    h.check("quantize anchors and round-trip bound", [](std::string& d) {
        if (quantize_value(1.0f, 16) != 65535 || quantize_value(0.5f, 8) != 128) {
            d = "anchors";
            return false;
        }
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const float v = static_cast<float>(i) / 10000.0f;
            worst = std::max(worst,
                             std::abs(static_cast<double>(dequantize_value(
                                          quantize_value(v, 16), 16)) - v));
        }
        d = "max err " + fmt(worst);
        return worst <= 0.5 / 65535.0 + 1e-7;
    });

    h.check("hdcfm census within published budget", [](std::string& d) {
        const ParamCensus census = count_params(HdcfmConfig{});
        d = std::to_string(census.total) + " params";
        return census.total >= 80000 && census.total <= 121000;
    });

    h.check("transform budget diagnostic", [](std::string& d) {
        const TransformBudget small = transform_budget(16, 16, 8, 8, 3);
        const TransformBudget fourk = transform_budget(3840, 2160, 64, 64, 3);
        d = "4K full " + fmt(static_cast<double>(fourk.full));
        return small.full == 147456ull && small.decoupled == 2376ull &&
               std::abs(static_cast<double>(fourk.full) - 3.057e11) <= 0.005 * 3.057e11;
    });

    h.check("hdcfm forward: determinism and finiteness (64x64)", [](std::string& d) {
        Xorshift64Star rng(81);
        const ModelWeights w = seeded_model_weights(9001);
        const ImageFrame x = random_sdr_frame(rng, 64, 64);
        const ImageFrame y1 = hdcfm_forward(x, w);
        const ImageFrame y2 = hdcfm_forward(x, w);
        if (!bit_equal(y1.pixels(), y2.pixels())) {
            d = "two runs differ";
            return false;
        }
        for (float v : y1.pixels().data())
            if (!(v >= 0.0f && v <= 1.0f)) {
                d = "output outside [0,1]";
                return false;
            }
        return true;
    });

    h.check("pdcg: 16 identity blocks collapse to pass-through", [](std::string& d) {
        ModelConfig cfg;
        cfg.pdcg.blocks = 16;
        ModelWeights w = seeded_model_weights(9002, cfg);
        for (int i = 0; i < 16; ++i) {
            const std::string p = "pdcg.block." + std::to_string(i) + ".conv.";
            WeightTensor zw;
            zw.dims = {static_cast<std::uint32_t>(cfg.pdcg.channels),
                       static_cast<std::uint32_t>(cfg.pdcg.channels), 3, 3};
            zw.data.assign(zw.count(), 0.0f);
            WeightTensor zb;
            zb.dims = {static_cast<std::uint32_t>(cfg.pdcg.channels)};
            zb.data.assign(zb.count(), 0.0f);
            w.put(p + "weight", std::move(zw));
            w.put(p + "bias", std::move(zb));
        }
        Xorshift64Star rng(82);
        const ImageFrame x(random_tensor(rng, 3, 32, 32, 0.0f, 1.0f), Gamut::BT2020,
                           Transfer::PQ);
        const Mask m(random_tensor(rng, 1, 32, 32, 0.0f, 1.0f));
        const ImageFrame full = pdcg_forward(x, m, w, cfg.pdcg);

        ModelConfig one = cfg;
        one.pdcg.blocks = 1;
        // Rebuild a single-block store from the 16-block one so the shared
        // stem/decoder tensors are identical.
        ModelWeights w_single;
        for (const auto& spec : pdcg_weight_specs(one.pdcg)) {
            WeightTensor t = w.get(spec.name);
            w_single.put(spec.name, std::move(t));
        }
        const ImageFrame collapsed = pdcg_forward(x, m, w_single, one.pdcg);
        if (!bit_equal(full.pixels(), collapsed.pixels())) {
            d = "identity blocks changed the result";
            return false;
        }
        return true;
    });

    h.check("weights container: round trip and corruption detection", [](std::string& d) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "hdrtv_selftest";
        fs::create_directories(dir);
        const std::string path = (dir / "w.hdcw").string();

        ModelConfig small;
        small.hdcfm.channels = 8;
        small.hdcfm.dyct_blocks = 1;
        small.pdcg.channels = 8;
        small.pdcg.blocks = 2;
        const ModelWeights w = seeded_model_weights(5, small);
        save_weights(w, path);
        const ModelWeights r = load_weights(path);
        if (r.tensor_count() != w.tensor_count()) {
            d = "tensor count changed";
            return false;
        }
        for (const auto& name : w.names()) {
            const auto& t0 = w.get(name);
            const auto& t1 = r.get(name);
            if (t0.dims != t1.dims ||
                std::memcmp(t0.data.data(), t1.data.data(), t0.data.size() * 4) != 0) {
                d = "tensor '" + name + "' not bit-identical";
                return false;
            }
        }

        // Flip one payload byte; the CRC must catch it.
        std::FILE* fp = std::fopen(path.c_str(), "rb+");
        if (!fp) {
            d = "reopen failed";
            return false;
        }
        std::fseek(fp, 0, SEEK_END);
        const long size = std::ftell(fp);
        std::fseek(fp, size / 2, SEEK_SET);
        int c = std::fgetc(fp);
        std::fseek(fp, size / 2, SEEK_SET);
        std::fputc(c ^ 0x40, fp);
        std::fclose(fp);
        try {
            (void)load_weights(path);
            d = "corruption not detected";
            return false;
        } catch (const CorruptWeights&) {
        }
        fs::remove_all(dir);
        return true;
    });

    h.check("seeded weights: determinism, seed separation, census match", [](std::string& d) {
        const ModelWeights a = seeded_model_weights(42);
        const ModelWeights b = seeded_model_weights(42);
        const ModelWeights c = seeded_model_weights(43);
        const auto names = a.names();
        bool same = true, differs = false;
        for (const auto& n : names) {
            if (std::memcmp(a.get(n).data.data(), b.get(n).data.data(),
                            a.get(n).data.size() * 4) != 0)
                same = false;
            if (std::memcmp(a.get(n).data.data(), c.get(n).data.data(),
                            a.get(n).data.size() * 4) != 0)
                differs = true;
        }
        if (!same) {
            d = "same seed differs";
            return false;
        }
        if (!differs) {
            d = "distinct seeds identical";
            return false;
        }
        std::size_t hdcfm_elems = 0;
        for (const auto& spec : hdcfm_weight_specs(HdcfmConfig{}))
            hdcfm_elems += spec.count();
        if (hdcfm_elems != count_params(HdcfmConfig{}).total) {
            d = "census does not match generator";
            return false;
        }
        return true;
    });

    h.check("pad/unpad round trip (bit-exact)", [](std::string& d) {
        Xorshift64Star rng(91);
        const ImageFrame f = random_sdr_frame(rng, 100, 100);
        auto [padded, rec] = pad_to_multiple(f, 32);
        if (padded.height() != 128 || padded.width() != 128 || rec.height != 100 ||
            rec.width != 100) {
            d = "pad geometry";
            return false;
        }
        if (!bit_equal(unpad(padded, rec).pixels(), f.pixels())) {
            d = "content region changed";
            return false;
        }
        return true;
    });

    return h.failures;
}

} // namespace hdrtv
