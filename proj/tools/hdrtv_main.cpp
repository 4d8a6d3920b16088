#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "hdrtv/hdcfm.hpp"
#include "hdrtv/metrics.hpp"
#include "hdrtv/pdcg.hpp"
#include "hdrtv/pipeline.hpp"
#include "hdrtv/png_io.hpp"
#include "hdrtv/selftest.hpp"

namespace {

// Exit codes: 0 ok, 2 usage, 3 io, 4 shape/state, 5 selftest failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitShape = 4;
constexpr int kExitSelftest = 5;

std::string dims_string(const std::vector<std::uint32_t>& dims) {
    std::ostringstream s;
    for (std::size_t i = 0; i < dims.size(); ++i)
        s << (i ? "x" : "") << dims[i];
    return s.str();
}

void print_census(const hdrtv::ParamCensus& census, const std::string& title) {
    std::cout << title << "\n";
    for (const auto& e : census.entries) {
        std::cout << "  " << std::left << std::setw(28) << e.name << std::right
                  << std::setw(14) << dims_string(e.dims) << std::setw(10) << e.count
                  << "\n";
    }
    std::cout << "  " << std::left << std::setw(28) << "total" << std::right
              << std::setw(24) << census.total << "\n";
}

// Warn about stored tensors no model consumes; extras are tolerated.
void warn_unknown_tensors(const hdrtv::ModelWeights& weights) {
    std::set<std::string> known;
    try {
        for (const auto& s : hdrtv::hdcfm_weight_specs(hdrtv::infer_hdcfm_config(weights)))
            known.insert(s.name);
    } catch (const hdrtv::Error&) {
    }
    try {
        for (const auto& s : hdrtv::pdcg_weight_specs(hdrtv::infer_pdcg_config(weights)))
            known.insert(s.name);
    } catch (const hdrtv::Error&) {
    }
    if (known.empty())
        return;
    for (const auto& name : weights.names())
        if (!known.count(name))
            std::cerr << "warning: ignoring unknown tensor '" << name << "'\n";
}

int run(int argc, char** argv) {
    CLI::App app{"SDRTV-to-HDRTV conversion engine and evaluation toolkit"};
    app.require_subcommand(1);

    // convert
    auto* convert = app.add_subcommand("convert", "Convert an SDR PNG to an HDR PNG");
    std::string in_path, out_path, weights_path, stage = "full";
    float mask_tau = 0.95f, mask_ramp = 0.05f;
    int bits = 16;
    convert->add_option("--input", in_path, "8-bit SDR input PNG")->required();
    convert->add_option("--output", out_path, "output PNG")->required();
    convert->add_option("--weights", weights_path, "weights container")->required();
    convert->add_option("--stage", stage, "hdcfm | full")
        ->check(CLI::IsMember({"hdcfm", "full"}));
    convert->add_option("--mask-tau", mask_tau, "over-exposure threshold");
    convert->add_option("--mask-ramp", mask_ramp, "over-exposure ramp width");
    convert->add_option("--bits", bits, "output bit depth")
        ->check(CLI::IsMember({8, 16}));

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Compare two frames");
    std::string ref_path, test_path, set = "psnr,ssim,deitp,hist";
    bool as_json = false;
    metrics->add_option("--ref", ref_path, "reference PNG")->required();
    metrics->add_option("--test", test_path, "test PNG")->required();
    metrics->add_option("--set", set, "comma-separated: psnr,ssim,deitp,hist");
    metrics->add_flag("--json", as_json, "emit a JSON document");

    // census
    auto* census_cmd = app.add_subcommand("census", "Print the parameter table");
    int census_channels = 32, census_blocks = 2, census_pdcg_blocks = 16;
    std::string census_model = "hdcfm";
    census_cmd->add_option("--channels", census_channels, "feature width");
    census_cmd->add_option("--dyct-blocks", census_blocks, "stage-1 DYCT blocks");
    census_cmd->add_option("--pdcg-blocks", census_pdcg_blocks, "stage-2 blocks");
    census_cmd->add_option("--model", census_model, "hdcfm | pdcg | all")
        ->check(CLI::IsMember({"hdcfm", "pdcg", "all"}));

    // selftest
    app.add_subcommand("selftest", "Run oracle-equivalence and invariant suites");

    // gen-weights
    auto* gen = app.add_subcommand("gen-weights", "Write a seeded random weights container");
    std::uint64_t seed = 0;
    std::string gen_out;
    int gen_channels = 32, gen_blocks = 2, gen_pdcg_blocks = 16;
    gen->add_option("--seed", seed, "PRNG seed")->required();
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_option("--channels", gen_channels, "feature width");
    gen->add_option("--dyct-blocks", gen_blocks, "stage-1 DYCT blocks");
    gen->add_option("--pdcg-blocks", gen_pdcg_blocks, "stage-2 blocks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (convert->parsed()) {
        hdrtv::ConvertOptions options;
        options.stage = stage == "hdcfm" ? hdrtv::Stage::Hdcfm : hdrtv::Stage::Full;
        options.mask_tau = mask_tau;
        options.mask_ramp = mask_ramp;
        options.bits = bits;
        const hdrtv::ModelWeights weights = hdrtv::load_weights(weights_path);
        warn_unknown_tensors(weights);
        const hdrtv::ImageFrame sdr = hdrtv::read_png(in_path);
        if (sdr.transfer() != hdrtv::Transfer::SdrGamma)
            throw hdrtv::StateError("convert: input must be an 8-bit SDR PNG");
        hdrtv::write_png(hdrtv::convert_frame(sdr, weights, options), out_path,
                         options.bits);
        return kExitOk;
    }

    if (metrics->parsed()) {
        const hdrtv::ImageFrame ref = hdrtv::read_png(ref_path);
        const hdrtv::ImageFrame test = hdrtv::read_png(test_path);
        nlohmann::ordered_json doc;
        std::ostringstream text;
        std::istringstream items(set);
        std::string item;
        while (std::getline(items, item, ',')) {
            if (item == "psnr") {
                const double v = hdrtv::psnr(ref, test);
                if (std::isinf(v))
                    doc["psnr"] = "inf";
                else
                    doc["psnr"] = v;
                text << "psnr=" << (std::isinf(v) ? "inf" : std::to_string(v)) << "\n";
            } else if (item == "ssim") {
                const double v = hdrtv::ssim(ref, test);
                doc["ssim"] = v;
                text << "ssim=" << v << "\n";
            } else if (item == "deitp") {
                const double v = hdrtv::delta_e_itp(ref, test);
                doc["deitp"] = v;
                text << "deitp=" << v << "\n";
            } else if (item == "hist") {
                const double v = hdrtv::hist_distance(hdrtv::histogram72(ref),
                                                      hdrtv::histogram72(test));
                doc["hist"] = v;
                text << "hist=" << v << "\n";
            } else {
                std::cerr << "unknown metric: " << item << "\n";
                return kExitUsage;
            }
        }
        if (as_json)
            std::cout << doc.dump(2) << "\n";
        else
            std::cout << text.str();
        return kExitOk;
    }

    if (census_cmd->parsed()) {
        if (census_model == "hdcfm" || census_model == "all") {
            hdrtv::HdcfmConfig cfg;
            cfg.channels = census_channels;
            cfg.dyct_blocks = census_blocks;
            print_census(hdrtv::count_params(cfg), "stage-1 (hdcfm)");
        }
        if (census_model == "pdcg" || census_model == "all") {
            hdrtv::PdcgConfig cfg;
            cfg.channels = census_channels;
            cfg.blocks = census_pdcg_blocks;
            print_census(hdrtv::count_params(cfg), "stage-2 (pdcg)");
        }
        return kExitOk;
    }

    if (app.get_subcommand("selftest")->parsed()) {
        const int failures = hdrtv::run_selftest(std::cout);
        if (failures > 0) {
            std::cout << failures << " check(s) failed\n";
            return kExitSelftest;
        }
        std::cout << "all checks passed\n";
        return kExitOk;
    }

    if (gen->parsed()) {
        hdrtv::ModelConfig cfg;
        cfg.hdcfm.channels = gen_channels;
        cfg.hdcfm.dyct_blocks = gen_blocks;
        cfg.pdcg.channels = gen_channels;
        cfg.pdcg.blocks = gen_pdcg_blocks;
        hdrtv::save_weights(hdrtv::seeded_model_weights(seed, cfg), gen_out);
        return kExitOk;
    }

    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const hdrtv::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const hdrtv::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const hdrtv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitShape;
    }
}
