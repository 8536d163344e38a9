#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rfdd/png_io.hpp"
#include "rfdd/rfdd.hpp"
#include "selftest.hpp"

namespace {

using namespace rfdd;

// key=value configuration entries; command-line flags override these.
void apply_config_entry(EnhanceConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "k") cfg.k = std::stof(value);
        else if (key == "feature_channels") cfg.feature_channels = std::stoi(value);
        else if (key == "downsample_levels") cfg.downsample_levels = std::stoi(value);
        else if (key == "alpha") cfg.fdd.alpha = std::stof(value);
        else if (key == "beta") cfg.fdd.beta = std::stof(value);
        else if (key == "irm_hidden") cfg.irm.hidden_channels = std::stoi(value);
        else if (key == "lambda_aux") cfg.lambda_aux = std::stof(value);
        else if (key == "lambda_hvi") cfg.lambda_hvi = std::stof(value);
        else if (key == "lambda_l1") cfg.lambda_l1 = std::stof(value);
        else if (key == "lambda_edge") cfg.lambda_edge = std::stof(value);
        else if (key == "lambda_ssim") cfg.lambda_ssim = std::stof(value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
    }
}

void load_config_file(EnhanceConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw IoError("cannot open config file '" + path + "'");
    }
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

// Shared --config/--k/... flags for the subcommands that build a pipeline.
struct ConfigFlags {
    std::string config_path;
    float k = 1.0f;
    int feature_channels = 16;
    int levels = 2;
    float alpha = 0.25f;
    float beta = 0.5f;
    CLI::Option* k_opt = nullptr;
    CLI::Option* fc_opt = nullptr;
    CLI::Option* levels_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value configuration file");
        k_opt = cmd->add_option("--k", k, "density parameter of the chrominance radius");
        fc_opt = cmd->add_option("--feature-channels", feature_channels, "backbone feature width");
        levels_opt = cmd->add_option("--levels", levels, "downsampling levels");
        alpha_opt = cmd->add_option("--alpha", alpha, "low-band ratio");
        beta_opt = cmd->add_option("--beta", beta, "high-band ratio");
    }

    EnhanceConfig build() const {
        EnhanceConfig cfg;
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (k_opt->count()) cfg.k = k;
        if (fc_opt->count()) cfg.feature_channels = feature_channels;
        if (levels_opt->count()) cfg.downsample_levels = levels;
        if (alpha_opt->count()) cfg.fdd.alpha = alpha;
        if (beta_opt->count()) cfg.fdd.beta = beta;
        cfg.fdd.channels = cfg.feature_channels;
        return cfg;
    }
};

Tensor remap_signed(const Tensor& plane) {
    Tensor out = plane;
    for (float& v : out.data) v = (v + 1.0f) * 0.5f;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RHVI-FDD low-light enhancement pipeline"};
    app.require_subcommand(1);
    int exit_code = 0;

    // transform
    auto* transform = app.add_subcommand("transform", "decompose an RGB image into H/V/I planes");
    std::string tr_input, tr_prefix = "hvi";
    float tr_k = 1.0f;
    transform->add_option("input", tr_input, "input PNG")->required();
    transform->add_option("-o,--output-prefix", tr_prefix, "output prefix for _h/_v/_i PNGs");
    transform->add_option("--k", tr_k, "density parameter");
    transform->callback([&] {
        const RgbImage img = load_image(tr_input);
        const HviImage hvi = hvi_forward(img, tr_k);
        save_gray(remap_signed(hvi.h), tr_prefix + "_h.png");
        save_gray(remap_signed(hvi.v), tr_prefix + "_v.png");
        save_gray(hvi.i, tr_prefix + "_i.png");
    });

    // inverse
    auto* inverse = app.add_subcommand("inverse", "reconstruct RGB from H/V/I plane PNGs");
    std::string inv_h, inv_v, inv_i, inv_out = "reconstructed.png";
    float inv_k = 1.0f;
    inverse->add_option("h_plane", inv_h, "H plane PNG")->required();
    inverse->add_option("v_plane", inv_v, "V plane PNG")->required();
    inverse->add_option("i_plane", inv_i, "I plane PNG")->required();
    inverse->add_option("-o,--output", inv_out, "output PNG");
    inverse->add_option("--k", inv_k, "density parameter");
    inverse->callback([&] {
        Tensor h = load_gray(inv_h);
        Tensor v = load_gray(inv_v);
        Tensor i = load_gray(inv_i);
        for (float& x : h.data) x = 2.0f * x - 1.0f;
        for (float& x : v.data) x = 2.0f * x - 1.0f;
        save_image(hvi_inverse(HviImage{std::move(h), std::move(v), std::move(i), inv_k}), inv_out);
    });

    // enhance
    auto* enhance_cmd = app.add_subcommand("enhance", "run the full enhancement pipeline");
    std::string en_input, en_weights, en_out = "enhanced.png";
    ConfigFlags en_cfg;
    enhance_cmd->add_option("input", en_input, "input PNG")->required();
    enhance_cmd->add_option("-w,--weights", en_weights, "weight container")->required();
    enhance_cmd->add_option("-o,--output", en_out, "output PNG");
    en_cfg.attach(enhance_cmd);
    enhance_cmd->callback([&] {
        const EnhanceConfig cfg = en_cfg.build();
        const WeightStore weights = load_weights(en_weights);
        const RgbImage img = load_image(en_input);
        const int h = img.height(), w = img.width();
        const RgbImage padded{pad_to_multiple(img.planes, cfg.spatial_multiple())};
        const RgbImage out = enhance(padded, weights, cfg);
        save_image(RgbImage{crop_to(out.planes, h, w)}, en_out);
    });

    // bands
    auto* bands_cmd = app.add_subcommand("bands", "export per-band bottleneck reconstructions");
    std::string ba_input, ba_weights, ba_prefix = "bands";
    ConfigFlags ba_cfg;
    bands_cmd->add_option("input", ba_input, "input PNG")->required();
    bands_cmd->add_option("-w,--weights", ba_weights, "weight container")->required();
    bands_cmd->add_option("-o,--output-prefix", ba_prefix, "output prefix for _low/_mid/_high PNGs");
    ba_cfg.attach(bands_cmd);
    bands_cmd->callback([&] {
        const EnhanceConfig cfg = ba_cfg.build();
        const WeightStore weights = load_weights(ba_weights);
        const RgbImage img = load_image(ba_input);
        const RgbImage padded{pad_to_multiple(img.planes, cfg.spatial_multiple())};
        const BandResponses responses = bands_visualize(padded, weights, cfg, true);
        save_gray(responses.low, ba_prefix + "_low.png");
        save_gray(responses.mid, ba_prefix + "_mid.png");
        save_gray(responses.high, ba_prefix + "_high.png");
    });

    // noise-bias
    auto* bias_cmd = app.add_subcommand("noise-bias", "Max-RGB bias statistics of a noisy image");
    std::string nb_clean, nb_noisy;
    bias_cmd->add_option("clean", nb_clean, "clean PNG")->required();
    bias_cmd->add_option("noisy", nb_noisy, "noisy PNG")->required();
    bias_cmd->callback([&] {
        const RgbImage clean = load_image(nb_clean);
        const RgbImage noisy = load_image(nb_noisy);
        const BiasReport report = noise_bias(clean.planes, noisy.planes);
        std::printf("mean=%.6f\n", report.mean_bias);
        std::printf("positive_fraction=%.6f\n", report.positive_fraction);
        std::printf("max=%.6f\n", report.max_bias);
    });

    // degrade
    auto* degrade_cmd = app.add_subcommand("degrade", "synthesize a low-light observation");
    std::string dg_input, dg_out = "degraded.png";
    DegradeParams dg_params;
    degrade_cmd->add_option("input", dg_input, "input PNG")->required();
    degrade_cmd->add_option("-o,--output", dg_out, "output PNG");
    degrade_cmd->add_option("--gamma", dg_params.gamma, "dimming exponent");
    degrade_cmd->add_option("--dim", dg_params.dim, "dimming factor");
    degrade_cmd->add_option("--sigma-read", dg_params.sigma_read, "readout noise sigma");
    degrade_cmd->add_option("--sigma-shot", dg_params.sigma_shot, "shot noise sigma");
    degrade_cmd->add_option("--seed", dg_params.seed, "noise stream seed");
    degrade_cmd->callback([&] {
        save_image(degrade(load_image(dg_input), dg_params), dg_out);
    });

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM/edge metrics of an image pair");
    std::string mt_a, mt_b;
    metrics_cmd->add_option("image_a", mt_a, "first PNG")->required();
    metrics_cmd->add_option("image_b", mt_b, "second PNG")->required();
    metrics_cmd->callback([&] {
        const RgbImage a = load_image(mt_a);
        const RgbImage b = load_image(mt_b);
        std::printf("psnr=%.3f\n", psnr(a, b));
        std::printf("ssim=%.6f\n", ssim(a, b));
        std::printf("edge=%.6f\n", edge_loss(a, b));
    });

    // init-weights
    auto* init_cmd = app.add_subcommand("init-weights", "write a seeded random weight container");
    std::string iw_out = "weights.rfdd";
    std::uint64_t iw_seed = 0;
    bool iw_summary = false;
    ConfigFlags iw_cfg;
    init_cmd->add_option("-o,--output", iw_out, "output container path");
    init_cmd->add_option("--seed", iw_seed, "initialization seed");
    init_cmd->add_flag("--summary", iw_summary, "print the total parameter count");
    iw_cfg.attach(init_cmd);
    init_cmd->callback([&] {
        const EnhanceConfig cfg = iw_cfg.build();
        const WeightStore store = init_enhance_weights(iw_seed, cfg);
        save_weights(store, iw_out);
        if (iw_summary) {
            std::printf("parameters=%zu\n", store.total_parameters());
        }
    });

    // selftest
    auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in oracle suite");
    selftest_cmd->callback([&] {
        if (run_selftest(std::cout) != 0) exit_code = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
