#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hdrtv/dyct.hpp"
#include "hdrtv/hdcfm.hpp"
#include "hdrtv/metrics.hpp"
#include "hdrtv/modulation.hpp"
#include "hdrtv/pad.hpp"
#include "hdrtv/pdcg.hpp"
#include "hdrtv/pipeline.hpp"
#include "hdrtv/png_io.hpp"
#include "hdrtv/selftest.hpp"

namespace py = pybind11;
using namespace hdrtv;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Tensor tensor_from_array(const FloatArray& array, int expected_channels = -1) {
    if (array.ndim() != 3)
        throw ShapeError("expected a (channels, height, width) float array");
    const auto c = static_cast<int>(array.shape(0));
    const auto h = static_cast<int>(array.shape(1));
    const auto w = static_cast<int>(array.shape(2));
    if (expected_channels >= 0 && c != expected_channels)
        throw ShapeError("expected " + std::to_string(expected_channels) + " channels");
    Tensor t(c, h, w);
    std::memcpy(t.data().data(), array.data(), t.size() * sizeof(float));
    return t;
}

FloatArray array_from_tensor(const Tensor& t) {
    FloatArray array({t.channels(), t.height(), t.width()});
    std::memcpy(array.mutable_data(), t.data().data(), t.size() * sizeof(float));
    return array;
}

ImageFrame frame_from_array(const FloatArray& array, Gamut g, Transfer tr) {
    return ImageFrame(tensor_from_array(array, 3), g, tr);
}

ImageFrame sdr_frame(const FloatArray& a) {
    return frame_from_array(a, Gamut::BT709, Transfer::SdrGamma);
}

ImageFrame pq_frame(const FloatArray& a) {
    return frame_from_array(a, Gamut::BT2020, Transfer::PQ);
}

Gamut parse_gamut(const std::string& s) {
    if (s == "bt709")
        return Gamut::BT709;
    if (s == "bt2020")
        return Gamut::BT2020;
    throw ConfigError("gamut must be 'bt709' or 'bt2020'");
}

ModelConfig make_config(int channels, int dyct_blocks, int pdcg_blocks) {
    ModelConfig cfg;
    cfg.hdcfm.channels = channels;
    cfg.hdcfm.dyct_blocks = dyct_blocks;
    cfg.pdcg.channels = channels;
    cfg.pdcg.blocks = pdcg_blocks;
    return cfg;
}

} // namespace

PYBIND11_MODULE(hdrtv, m) {
    m.doc() = "SDRTV-to-HDRTV conversion engine: two-stage mapping network, "
              "color science chain, and objective metrics";

    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<MissingWeightError>(m, "MissingWeightError", PyExc_KeyError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<ModelWeights>(m, "Weights")
        .def_static("load", &load_weights, py::arg("path"))
        .def_static(
            "generate",
            [](std::uint64_t seed, int channels, int dyct_blocks, int pdcg_blocks) {
                return seeded_model_weights(seed, make_config(channels, dyct_blocks,
                                                              pdcg_blocks));
            },
            py::arg("seed"), py::arg("channels") = 32, py::arg("dyct_blocks") = 2,
            py::arg("pdcg_blocks") = 16)
        .def("save", &save_weights, py::arg("path"))
        .def("names", [](const ModelWeights& w) { return w.names(); })
        .def("__len__", &ModelWeights::tensor_count)
        .def("__contains__", &ModelWeights::contains);

    // stage forwards
    m.def(
        "hdcfm_forward",
        [](const FloatArray& sdr, const ModelWeights& w) {
            return array_from_tensor(
                hdcfm_forward(sdr_frame(sdr), w, infer_hdcfm_config(w)).pixels());
        },
        py::arg("sdr"), py::arg("weights"),
        "Stage-1 mapping of an SDR-gamma (3,H,W) array to PQ codes; H and W "
        "must be divisible by 32.");
    m.def(
        "pdcg_forward",
        [](const FloatArray& x_hr, const FloatArray& mask, const ModelWeights& w) {
            return array_from_tensor(pdcg_forward(pq_frame(x_hr),
                                                  Mask(tensor_from_array(mask, 1)), w,
                                                  infer_pdcg_config(w))
                                         .pixels());
        },
        py::arg("x_hr"), py::arg("mask"), py::arg("weights"),
        "Stage-2 over-exposure generator on a PQ (3,H,W) array and a (1,H,W) mask.");
    m.def(
        "blend",
        [](const FloatArray& raw, const FloatArray& x_hr, const FloatArray& mask) {
            return array_from_tensor(
                blend(pq_frame(raw), pq_frame(x_hr), Mask(tensor_from_array(mask, 1)))
                    .pixels());
        },
        py::arg("raw"), py::arg("x_hr"), py::arg("mask"),
        "raw * mask + x_hr * (1 - mask), clamped to the per-pixel envelope.");
    m.def(
        "convert",
        [](const FloatArray& sdr, const ModelWeights& w, const std::string& stage,
           float mask_tau, float mask_ramp) {
            ConvertOptions options;
            options.stage = stage == "hdcfm" ? Stage::Hdcfm : Stage::Full;
            options.mask_tau = mask_tau;
            options.mask_ramp = mask_ramp;
            return array_from_tensor(convert_frame(sdr_frame(sdr), w, options).pixels());
        },
        py::arg("sdr"), py::arg("weights"), py::arg("stage") = "full",
        py::arg("mask_tau") = 0.95f, py::arg("mask_ramp") = 0.05f,
        "Full pipeline on an SDR-gamma (3,H,W) array of any resolution.");
    m.def("convert_file",
          [](const std::string& input, const std::string& output,
             const std::string& weights, const std::string& stage, float mask_tau,
             float mask_ramp, int bits) {
              ConvertOptions options;
              options.stage = stage == "hdcfm" ? Stage::Hdcfm : Stage::Full;
              options.mask_tau = mask_tau;
              options.mask_ramp = mask_ramp;
              options.bits = bits;
              convert_file(input, output, weights, options);
          },
          py::arg("input"), py::arg("output"), py::arg("weights"),
          py::arg("stage") = "full", py::arg("mask_tau") = 0.95f,
          py::arg("mask_ramp") = 0.05f, py::arg("bits") = 16);

    // color science
    m.def("sdr_eotf", [](const FloatArray& a) {
        return array_from_tensor(sdr_eotf(sdr_frame(a)).pixels());
    });
    m.def("sdr_oetf", [](const FloatArray& a) {
        return array_from_tensor(
            sdr_oetf(frame_from_array(a, Gamut::BT709, Transfer::Linear)).pixels());
    });
    m.def("pq_eotf", [](const FloatArray& a) {
        return array_from_tensor(pq_eotf(pq_frame(a)));
    });
    m.def(
        "pq_oetf",
        [](const FloatArray& nits, const std::string& gamut) {
            return array_from_tensor(
                pq_oetf(tensor_from_array(nits, 3), parse_gamut(gamut)).pixels());
        },
        py::arg("nits"), py::arg("gamut") = "bt2020");
    m.def(
        "gamut_convert",
        [](const FloatArray& linear, const std::string& from, const std::string& to) {
            return array_from_tensor(
                gamut_convert(frame_from_array(linear, parse_gamut(from), Transfer::Linear),
                              parse_gamut(to))
                    .pixels());
        },
        py::arg("linear"), py::arg("from_gamut"), py::arg("to_gamut"));
    m.def(
        "overexposure_mask",
        [](const FloatArray& sdr, float tau, float ramp) {
            return array_from_tensor(overexposure_mask(sdr_frame(sdr), tau, ramp).values());
        },
        py::arg("sdr"), py::arg("tau") = 0.95f, py::arg("ramp") = 0.05f);

    // metrics; psnr/ssim accept any matching pair, deitp requires PQ data
    m.def("psnr", [](const FloatArray& a, const FloatArray& b) {
        return psnr(pq_frame(a), pq_frame(b));
    });
    m.def("ssim", [](const FloatArray& a, const FloatArray& b) {
        return ssim(pq_frame(a), pq_frame(b));
    });
    m.def("delta_e_itp", [](const FloatArray& a, const FloatArray& b) {
        return delta_e_itp(pq_frame(a), pq_frame(b));
    });
    m.def("histogram72", [](const FloatArray& a) {
        const Histogram72 h = histogram72(pq_frame(a));
        py::array_t<std::uint64_t> bins(std::vector<py::ssize_t>{72});
        auto out = bins.mutable_unchecked<1>();
        for (py::ssize_t i = 0; i < 72; ++i)
            out(i) = h.bins[static_cast<std::size_t>(i)];
        return bins;
    });
    m.def("hist_distance", [](const FloatArray& a, const FloatArray& b) {
        return hist_distance(histogram72(pq_frame(a)), histogram72(pq_frame(b)));
    });

    // file I/O: returns (array, gamut, transfer)
    m.def("read_png", [](const std::string& path) {
        const ImageFrame f = read_png(path);
        return py::make_tuple(array_from_tensor(f.pixels()),
                              std::string(f.gamut() == Gamut::BT709 ? "bt709" : "bt2020"),
                              std::string(f.transfer() == Transfer::SdrGamma ? "sdr_gamma"
                                          : f.transfer() == Transfer::PQ     ? "pq"
                                                                             : "linear"));
    });
    m.def(
        "write_png",
        [](const FloatArray& a, const std::string& path, int bits) {
            write_png(bits == 8 ? sdr_frame(a) : pq_frame(a), path, bits);
        },
        py::arg("array"), py::arg("path"), py::arg("bits") = 16);

    // diagnostics
    m.def(
        "census",
        [](int channels, int dyct_blocks) {
            HdcfmConfig cfg;
            cfg.channels = channels;
            cfg.dyct_blocks = dyct_blocks;
            const ParamCensus census = count_params(cfg);
            py::list entries;
            for (const auto& e : census.entries)
                entries.append(py::make_tuple(e.name, e.dims, e.count));
            return py::make_tuple(entries, census.total);
        },
        py::arg("channels") = 32, py::arg("dyct_blocks") = 2);
    m.def(
        "transform_budget",
        [](int height, int width, int c_in, int c_out, int k) {
            const TransformBudget b = transform_budget(height, width, c_in, c_out, k);
            return py::make_tuple(b.full, b.decoupled, b.ratio());
        },
        py::arg("height"), py::arg("width"), py::arg("c_in"), py::arg("c_out"),
        py::arg("k") = 3);
    m.def("selftest", [] {
        std::ostringstream out;
        const int failures = run_selftest(out);
        return py::make_tuple(failures, out.str());
    });
}
