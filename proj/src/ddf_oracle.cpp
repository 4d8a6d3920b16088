// Reference implementation of decoupled dynamic filtering, kept in its own
// translation unit so the fast path in dyct.cpp and this matrix formulation
// stay independent. It materializes, for every output location, the combined
// C x k^2 filter matrix and multiplies it against the flattened
// replicate-padded neighborhood.

#include "hdrtv/dyct.hpp"

#include <vector>

#ifdef HDRTV_ORACLE_ACCUM_F64
using oracle_acc = double;
#else
using oracle_acc = float;
#endif

namespace hdrtv {

Tensor ddf_oracle(const Tensor& f, const SpatialKernels& ks, const ChannelKernels& kc) {
    const int k = ks.k;
    if (kc.k != k)
        throw ShapeError("ddf_oracle: spatial and channel kernel sizes differ");
    if (ks.values.channels() != k * k || ks.values.height() != f.height() ||
        ks.values.width() != f.width())
        throw ShapeError("ddf_oracle: spatial kernels must be k^2 x H x W");
    if (kc.values.channels() != f.channels() || kc.values.height() != k ||
        kc.values.width() != k)
        throw ShapeError("ddf_oracle: channel kernels must be C x k x k");

    const int taps = k * k;
    const int channels = f.channels();
    const int h = f.height();
    const int w = f.width();
    const int radius = k / 2;

    std::vector<float> matrix(static_cast<std::size_t>(channels) * taps);
    std::vector<float> neighborhood(taps);

    Tensor out(channels, h, w);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            // Combined filter matrix at this location: row c holds the k^2
            // tap weights kc(c,u,v) * ks(u*k+v,i,j).
            for (int c = 0; c < channels; ++c)
                for (int u = 0; u < k; ++u)
                    for (int v = 0; v < k; ++v)
                        matrix[static_cast<std::size_t>(c) * taps + u * k + v] =
                            kc.values(c, u, v) * ks.values(u * k + v, i, j);

            for (int c = 0; c < channels; ++c) {
                int t = 0;
                for (int u = 0; u < k; ++u) {
                    int iy = i + u - radius;
                    iy = iy < 0 ? 0 : (iy > h - 1 ? h - 1 : iy);
                    for (int v = 0; v < k; ++v, ++t) {
                        int ix = j + v - radius;
                        ix = ix < 0 ? 0 : (ix > w - 1 ? w - 1 : ix);
                        neighborhood[t] = f(c, iy, ix);
                    }
                }
                oracle_acc dot = 0;
                const float* row = matrix.data() + static_cast<std::size_t>(c) * taps;
                for (t = 0; t < taps; ++t)
                    dot += static_cast<oracle_acc>(row[t]) * neighborhood[t];
                out(c, i, j) = saturate_activation(static_cast<float>(dot));
            }
        }
    }
    return out;
}

} // namespace hdrtv
