#include <doctest.h>

#include <cmath>

#include "hdrtv/dyct.hpp"
#include "test_util.hpp"

using namespace hdrtv;
using namespace hdrtv::test;

namespace {

ModelWeights seeded_block(std::uint64_t seed, int channels, const std::string& prefix) {
    std::vector<WeightSpec> specs;
    append_dyct_specs(specs, prefix, channels, 3);
    return seeded_weights(seed, specs);
}

ModelWeights zeroed_block(int channels, const std::string& prefix) {
    std::vector<WeightSpec> specs;
    append_dyct_specs(specs, prefix, channels, 3);
    ModelWeights w;
    for (const auto& spec : specs) {
        WeightTensor t;
        t.dims = spec.dims;
        t.data.assign(spec.count(), 0.0f);
        w.put(spec.name, std::move(t));
    }
    return w;
}

void zero_tensor(ModelWeights& w, const std::string& name) {
    WeightTensor t = w.get(name);
    std::fill(t.data.begin(), t.data.end(), 0.0f);
    w.put(name, std::move(t));
}

SpatialKernels delta_spatial(int h, int w, int k) {
    Tensor t(k * k, h, w);
    const int center = (k / 2) * k + k / 2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            t(center, y, x) = 1.0f;
    return {std::move(t), k};
}

} // namespace

TEST_CASE("skp_predict: zero weights give zero kernels of shape k^2 x H x W") {
    Xorshift64Star rng(20);
    const Tensor f = random_tensor(rng, 6, 8, 9);
    const SpatialKernels ks = skp_predict(f, zeroed_block(6, "d."), "d.");
    CHECK(ks.values.channels() == 9);
    CHECK(ks.values.height() == 8);
    CHECK(ks.values.width() == 9);
    for (float v : ks.values.data())
        CHECK(v == 0.0f);
}

TEST_CASE("skp_predict: constant input predicts spatially constant kernels") {
    const Tensor f = Tensor::full(6, 10, 7, 0.37f);
    const SpatialKernels ks = skp_predict(f, seeded_block(3, 6, "d."), "d.");
    for (int t = 0; t < 9; ++t) {
        const float ref = ks.values(t, 0, 0);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 7; ++x)
                CHECK(std::abs(ks.values(t, y, x) - ref) <= 1e-5f);
    }
}

TEST_CASE("ckp_predict: zero weights, shape, and pooling permutation invariance") {
    Xorshift64Star rng(21);
    const Tensor f = random_tensor(rng, 5, 6, 6);
    const ModelWeights w = seeded_block(4, 5, "d.");
    const ChannelKernels kc = ckp_predict(f, w, "d.");
    CHECK(kc.values.channels() == 5);
    CHECK(kc.values.height() == 3);
    CHECK(kc.values.width() == 3);

    const ChannelKernels kz = ckp_predict(f, zeroed_block(5, "d."), "d.");
    for (float v : kz.values.data())
        CHECK(v == 0.0f);

    // spatially permuting the input leaves the pooled prediction unchanged
    Tensor permuted(5, 6, 6);
    for (int c = 0; c < 5; ++c)
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x)
                permuted(c, y, x) = f(c, 5 - y, (x + 3) % 6);
    const ChannelKernels kp = ckp_predict(permuted, w, "d.");
    CHECK(max_abs_diff(kc.values, kp.values) <= 1e-6);
}

TEST_CASE("ddf_apply: delta spatial x unit channel kernels is the exact identity") {
    Xorshift64Star rng(22);
    const Tensor f = random_tensor(rng, 5, 6, 7, -2.0f, 2.0f);
    const SpatialKernels ks = delta_spatial(6, 7, 3);
    const ChannelKernels unit{Tensor::full(5, 3, 3, 1.0f), 3};
    CHECK(bit_equal(ddf_apply(f, ks, unit), f));

    const ChannelKernels zeros{Tensor(5, 3, 3), 3};
    const Tensor annihilated = ddf_apply(f, ks, zeros);
    for (float v : annihilated.data())
        CHECK(v == 0.0f);
}

TEST_CASE("ddf_apply equals ddf_oracle on seeded random instances") {
    double worst = 0.0;
    for (int seed = 1; seed <= 25; ++seed) {
        Xorshift64Star rng(seed);
        const int c = 1 + static_cast<int>(rng.next() % 16);
        const int h = 4 + static_cast<int>(rng.next() % 29);
        const int w = 4 + static_cast<int>(rng.next() % 29);
        const Tensor f = random_tensor(rng, c, h, w);
        const SpatialKernels ks{random_tensor(rng, 9, h, w), 3};
        const ChannelKernels kc{random_tensor(rng, c, 3, 3), 3};
        worst = std::max(worst, max_abs_diff(ddf_apply(f, ks, kc), ddf_oracle(f, ks, kc)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("ddf_apply is linear in the features for fixed kernels") {
    Xorshift64Star rng(23);
    const int c = 4, h = 6, w = 6;
    const SpatialKernels ks{random_tensor(rng, 9, h, w), 3};
    const ChannelKernels kc{random_tensor(rng, c, 3, 3), 3};
    const Tensor f1 = random_tensor(rng, c, h, w);
    const Tensor f2 = random_tensor(rng, c, h, w);
    Tensor combo(c, h, w);
    for (std::size_t i = 0; i < combo.data().size(); ++i)
        combo.data()[i] = 1.5f * f1.data()[i] + 0.25f * f2.data()[i];
    const Tensor lhs = ddf_apply(combo, ks, kc);
    const Tensor r1 = ddf_apply(f1, ks, kc);
    const Tensor r2 = ddf_apply(f2, ks, kc);
    for (std::size_t i = 0; i < lhs.data().size(); ++i)
        CHECK(std::abs(lhs.data()[i] - (1.5 * r1.data()[i] + 0.25 * r2.data()[i])) <= 1e-5);
}

TEST_CASE("ddf_oracle: single-pixel hand expansion and zero input") {
    Xorshift64Star rng(24);
    Tensor f(1, 1, 1);
    f(0, 0, 0) = 0.8f;
    const SpatialKernels ks{random_tensor(rng, 9, 1, 1), 3};
    const ChannelKernels kc{random_tensor(rng, 1, 3, 3), 3};
    // replicate padding makes every tap read the sole pixel
    double expect = 0.0;
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
            expect += static_cast<double>(ks.values(u * 3 + v, 0, 0)) * kc.values(0, u, v);
    expect *= f(0, 0, 0);
    CHECK(std::abs(ddf_oracle(f, ks, kc)(0, 0, 0) - expect) <= 1e-6);

    const Tensor zero(1, 1, 1);
    CHECK(ddf_oracle(zero, ks, kc)(0, 0, 0) == 0.0f);
}

TEST_CASE("ddf shape validation") {
    const Tensor f(4, 6, 6);
    const SpatialKernels bad_ks{Tensor(9, 5, 6), 3};
    const ChannelKernels kc{Tensor(4, 3, 3), 3};
    CHECK_THROWS_AS(ddf_apply(f, bad_ks, kc), ShapeError);
    const SpatialKernels ks{Tensor(9, 6, 6), 3};
    const ChannelKernels bad_kc{Tensor(3, 3, 3), 3};
    CHECK_THROWS_AS(ddf_apply(f, ks, bad_kc), ShapeError);
}

TEST_CASE("context_block: zero transform weights make it the exact identity") {
    Xorshift64Star rng(25);
    const Tensor f = random_tensor(rng, 8, 7, 5);
    ModelWeights w = seeded_block(6, 8, "d.");
    zero_tensor(w, "d.cb.fc1.weight");
    zero_tensor(w, "d.cb.fc1.bias");
    CHECK(bit_equal(context_block(f, w, "d."), f));
}

TEST_CASE("context_block: constant input pools to the channel mean") {
    const Tensor f = Tensor::full(8, 6, 6, 0.31f);
    ModelWeights w = seeded_block(7, 8, "d.");
    // with equal logits the softmax is uniform, so the context equals GAP
    const Tensor out = context_block(f, w, "d.");
    const Tensor gap = global_avg_pool(f);
    // recover the context via the residual: out - f is the transformed context,
    // spatially uniform; just check uniformity and shape here
    CHECK(out.same_shape(f));
    for (int c = 0; c < 8; ++c) {
        const float base = out(c, 0, 0) - f(c, 0, 0);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x)
                CHECK(std::abs(out(c, y, x) - f(c, y, x) - base) <= 1e-6f);
    }
    CHECK(gap(0, 0, 0) == doctest::Approx(0.31f));
}

TEST_CASE("context_block residual is spatially uniform per channel") {
    Xorshift64Star rng(26);
    const Tensor f = random_tensor(rng, 8, 9, 4);
    const ModelWeights w = seeded_block(8, 8, "d.");
    const Tensor out = context_block(f, w, "d.");
    for (int c = 0; c < 8; ++c) {
        const float base = out(c, 0, 0) - f(c, 0, 0);
        for (int y = 0; y < 9; ++y)
            for (int x = 0; x < 4; ++x)
                CHECK(std::abs(out(c, y, x) - f(c, y, x) - base) <= 1e-6f);
    }
}

TEST_CASE("dyct_forward: shape preserved and composition is bit-exact") {
    Xorshift64Star rng(27);
    const Tensor f = random_tensor(rng, 8, 8, 8);
    const ModelWeights w = seeded_block(9, 8, "d.");
    const Tensor composed = dyct_forward(f, w, "d.");
    CHECK(composed.same_shape(f));

    const SpatialKernels ks = skp_predict(f, w, "d.");
    const ChannelKernels kc = ckp_predict(f, w, "d.");
    const Tensor manual = context_block(ddf_apply(f, ks, kc), w, "d.");
    CHECK(bit_equal(composed, manual));
}

TEST_CASE("dyct_forward: delta/unit biases with zero transform is the identity") {
    Xorshift64Star rng(28);
    const Tensor f = random_tensor(rng, 4, 6, 6);
    ModelWeights w = zeroed_block(4, "d.");
    // SKP bias forms a center delta; CKP bias forms all-ones channel kernels.
    WeightTensor skp_bias = w.get("d.skp.1.bias");
    skp_bias.data[4] = 1.0f;
    w.put("d.skp.1.bias", std::move(skp_bias));
    WeightTensor ckp_bias = w.get("d.ckp.bias");
    std::fill(ckp_bias.data.begin(), ckp_bias.data.end(), 1.0f);
    w.put("d.ckp.bias", std::move(ckp_bias));
    CHECK(bit_equal(dyct_forward(f, w, "d."), f));
}

TEST_CASE("kernel normalization flag: predicted taps form a softmax simplex") {
    Xorshift64Star rng(58);
    const Tensor f = random_tensor(rng, 6, 5, 5);
    const ModelWeights w = seeded_block(12, 6, "d.");
    const SpatialKernels ks = skp_predict(f, w, "d.", 3, true);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            double sum = 0.0;
            for (int t = 0; t < 9; ++t) {
                CHECK(ks.values(t, y, x) > 0.0f);
                sum += ks.values(t, y, x);
            }
            CHECK(std::abs(sum - 1.0) <= 1e-6);
        }
    const ChannelKernels kc = ckp_predict(f, w, "d.", 3, true);
    for (int c = 0; c < 6; ++c) {
        double sum = 0.0;
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                sum += kc.values(c, u, v);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
    // default path is unnormalized
    const SpatialKernels raw = skp_predict(f, w, "d.");
    bool any_negative = false;
    for (float v : raw.values.data())
        any_negative = any_negative || v < 0.0f;
    CHECK(any_negative);
}

TEST_CASE("ddf: mirroring content, kernel fields, and tap order mirrors the output") {
    // The decoupled filter is flip-equivariant when the per-pixel kernel
    // field is mirrored spatially AND its tap indexing is mirrored, and the
    // per-channel kernels' taps are mirrored likewise.
    Xorshift64Star rng(29);
    const int c = 4, h = 6, w = 8, k = 3;
    const Tensor f = random_tensor(rng, c, h, w);
    const SpatialKernels ks{random_tensor(rng, k * k, h, w), k};
    const ChannelKernels kc{random_tensor(rng, c, k, k), k};

    Tensor ks_m(k * k, h, w);
    for (int u = 0; u < k; ++u)
        for (int v = 0; v < k; ++v)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    ks_m(u * k + v, y, x) = ks.values(u * k + (k - 1 - v), y, w - 1 - x);
    Tensor kc_m(c, k, k);
    for (int cc = 0; cc < c; ++cc)
        for (int u = 0; u < k; ++u)
            for (int v = 0; v < k; ++v)
                kc_m(cc, u, v) = kc.values(cc, u, k - 1 - v);

    const Tensor direct = ddf_apply(f, ks, kc);
    const Tensor mirrored = flip_horizontal(
        ddf_apply(flip_horizontal(f), {std::move(ks_m), k}, {std::move(kc_m), k}));
    CHECK(max_abs_diff(direct, mirrored) <= 1e-5);
}

TEST_CASE("transform_budget reproduces the parameter-product formula") {
    const TransformBudget small = transform_budget(16, 16, 8, 8, 3);
    CHECK(small.full == 147456ull);
    CHECK(small.decoupled == 2376ull);
    CHECK(small.ratio() == doctest::Approx(147456.0 / 2376.0));

    const TransformBudget fourk = transform_budget(3840, 2160, 64, 64, 3);
    CHECK(std::abs(static_cast<double>(fourk.full) - 3.057e11) <= 0.005 * 3.057e11);
}
