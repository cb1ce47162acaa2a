// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "ghostsim/ghostsim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ghostsim_cli {

namespace {

void check(int status) {
    if (status != GS_OK) throw ApiError(status, gs_last_error());
}

// RAII handle wrappers.
using ImagePtr = std::unique_ptr<GsImage, void (*)(GsImage*)>;
using EnsemblePtr = std::unique_ptr<GsEnsemble, void (*)(GsEnsemble*)>;
using BucketsPtr = std::unique_ptr<GsBuckets, void (*)(GsBuckets*)>;
using RecordsPtr = std::unique_ptr<GsRecords, void (*)(GsRecords*)>;
using ZhangPtr = std::unique_ptr<GsZhang, void (*)(GsZhang*)>;

ImagePtr wrap(GsImage* p) { return ImagePtr(p, &gs_image_destroy); }
EnsemblePtr wrap(GsEnsemble* p) { return EnsemblePtr(p, &gs_ensemble_destroy); }
BucketsPtr wrap(GsBuckets* p) { return BucketsPtr(p, &gs_buckets_destroy); }
RecordsPtr wrap(GsRecords* p) { return RecordsPtr(p, &gs_records_destroy); }
ZhangPtr wrap(GsZhang* p) { return ZhangPtr(p, &gs_zhang_destroy); }

std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ApiError(GS_E_IO, "cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ApiError(GS_E_IO, "cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ApiError(GS_E_IO, "write to '" + path + "' failed");
}

void write_manifest(const std::string& dir, const json& j) {
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

json read_manifest(const std::string& dir) {
    const std::string path = dir + "/manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ApiError(GS_E_IO, "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ApiError(GS_E_IO, "malformed manifest '" + path + "': " + e.what());
    }
    return j;
}

std::string mask_file_name(int j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "mask_%05d.pgm", j);
    return buf;
}

/// Parse "none", "poisson[:sp]", "gaussian:sm", "both:sp:sm".
void parse_noise(const std::string& text, int& kind, double& sigma_p, double& sigma_m) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t colon = text.find(':', pos);
        const size_t stop = colon == std::string::npos ? text.size() : colon;
        parts.push_back(text.substr(pos, stop - pos));
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    const auto num = [&](size_t i, double fallback) {
        if (parts.size() <= i || parts[i].empty()) return fallback;
        double v = 0.0;
        const std::from_chars_result res =
            std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), v);
        if (res.ec != std::errc() || res.ptr != parts[i].data() + parts[i].size())
            throw ApiError(GS_E_INVALID_ARGUMENT,
                           "malformed noise parameter '" + parts[i] + "' in '" + text + "'");
        return v;
    };
    sigma_p = 1.0;
    sigma_m = 0.0;
    if (parts[0] == "none") {
        kind = GS_NOISE_NONE;
    } else if (parts[0] == "poisson") {
        kind = GS_NOISE_POISSON;
        sigma_p = num(1, 1.0);
    } else if (parts[0] == "gaussian") {
        kind = GS_NOISE_GAUSSIAN;
        sigma_m = num(1, 0.0);
    } else if (parts[0] == "both") {
        kind = GS_NOISE_BOTH;
        sigma_p = num(1, 1.0);
        sigma_m = num(2, 0.0);
    } else {
        throw ApiError(GS_E_INVALID_ARGUMENT,
                       "unknown noise kind '" + parts[0] +
                           "' (expected none, poisson, gaussian, or both)");
    }
}

const char* noise_kind_text(int kind) {
    switch (kind) {
        case GS_NOISE_NONE: return "none";
        case GS_NOISE_POISSON: return "poisson";
        case GS_NOISE_GAUSSIAN: return "gaussian";
        case GS_NOISE_BOTH: return "both";
    }
    return "unknown";
}

/// Load a mask directory written by cmd_masks back into an ensemble.
EnsemblePtr load_ensemble(const std::string& dir, json* manifest_out = nullptr) {
    const json manifest = read_manifest(dir);
    if (!manifest.contains("family") || !manifest.contains("J"))
        throw ApiError(GS_E_IO, "manifest '" + dir + "/manifest.json' lacks family/J");
    const std::string family_name = manifest["family"].get<std::string>();
    const int J = manifest["J"].get<int>();

    int family = 0;
    check(gs_mask_family_from_name(family_name.c_str(), &family));
    GsEnsemble* raw = nullptr;
    check(gs_ensemble_create(family, &raw));
    EnsemblePtr ens = wrap(raw);
    for (int j = 0; j < J; ++j) {
        GsImage* img = nullptr;
        check(gs_image_read_pgm16((dir + "/" + mask_file_name(j)).c_str(), &img, nullptr,
                                  nullptr));
        const ImagePtr mask = wrap(img);
        check(gs_ensemble_push_mask(ens.get(), mask.get()));
    }
    check(gs_ensemble_finalize(ens.get()));
    if (manifest_out) *manifest_out = manifest;
    return ens;
}

void write_buckets_csv(const std::string& path, const GsBuckets* buckets) {
    int J = 0;
    check(gs_buckets_count(buckets, &J));
    std::string text = "j,value\n";
    for (int j = 0; j < J; ++j) {
        double v = 0.0;
        check(gs_buckets_value(buckets, j, &v));
        text += std::to_string(j);
        text += ',';
        text += format_double(v);
        text += '\n';
    }
    write_text(path, text);
}

BucketsPtr load_buckets(const std::string& dir) {
    const json manifest = read_manifest(dir);
    const double exposure_s = manifest.value("exposure_s", 0.0);
    const double photon_scale = manifest.value("photon_scale", 1.0);

    const std::string path = dir + "/buckets.csv";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ApiError(GS_E_IO, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "j,value")
        throw ApiError(GS_E_IO, "'" + path + "' does not start with the 'j,value' header");
    std::vector<double> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ApiError(GS_E_IO, path + ":" + std::to_string(line_no) + ": expected 'j,value'");
        double v = 0.0;
        const char* begin = line.data() + comma + 1;
        const std::from_chars_result res = std::from_chars(begin, line.data() + line.size(), v);
        if (res.ec != std::errc())
            throw ApiError(GS_E_IO, path + ":" + std::to_string(line_no) + ": malformed value");
        values.push_back(v);
    }
    if (values.empty()) throw ApiError(GS_E_IO, "'" + path + "' contains no measurements");

    GsBuckets* raw = nullptr;
    check(gs_buckets_create(static_cast<int>(values.size()), values.data(), exposure_s,
                            photon_scale, &raw));
    return wrap(raw);
}

void write_image(const std::string& path, const GsImage* img, double lo, double hi) {
    check(gs_image_write_pgm16(img, path.c_str(), lo, hi));
}

json image_summary(const GsImage* img) {
    int rows = 0, cols = 0;
    double pitch = 0.0, mu = 0.0, sigma = 0.0;
    check(gs_image_rows(img, &rows));
    check(gs_image_cols(img, &cols));
    check(gs_image_pitch_mm(img, &pitch));
    check(gs_image_stats(img, &mu, &sigma));
    return json{{"rows", rows}, {"cols", cols}, {"pitch_mm", pitch}, {"mu", mu},
                {"sigma", sigma}};
}

/// Build the measurement object named by `spec` on an n-by-n grid.
ImagePtr make_object(const SimulateArgs& args, int n) {
    GsImage* raw = nullptr;
    if (args.object == "uniform") {
        check(gs_make_uniform_object(n, args.mu_T, args.sigma_T, args.seed, "object", &raw));
    } else if (args.object == "stencil") {
        check(gs_make_two_level_stencil(n, args.frac_hi, args.lo, args.hi, &raw));
    } else if (args.object == "xgi") {
        check(gs_make_stencil(n, args.rotation_deg, &raw));
    } else {
        check(gs_image_read_pgm16(args.object.c_str(), &raw, nullptr, nullptr));
        ImagePtr img = wrap(raw);
        int rows = 0, cols = 0;
        check(gs_image_rows(img.get(), &rows));
        check(gs_image_cols(img.get(), &cols));
        if (rows != n || cols != n)
            throw ApiError(GS_E_DIMENSION_MISMATCH,
                           "object '" + args.object + "' is " + std::to_string(rows) + "x" +
                               std::to_string(cols) + " but the masks are " +
                               std::to_string(n) + "x" + std::to_string(n));
        return img;
    }
    return wrap(raw);
}

} // namespace

void cmd_masks(const MasksArgs& args) {
    GsEnsemble* raw = nullptr;
    if (args.family == "random_binary") {
        check(gs_gen_random_binary(args.n, args.J, args.mu_A, args.seed,
                                   args.seed_label.c_str(), &raw));
    } else if (args.family == "random_gray") {
        check(gs_gen_random_gray(args.n, args.J, args.mu_A, args.sigma_A, args.seed,
                                 args.seed_label.c_str(), &raw));
    } else if (args.family == "hadamard") {
        check(gs_gen_hadamard(args.n, &raw));
    } else if (args.family == "ura_scan") {
        check(gs_gen_ura_scan(args.p, &raw));
    } else if (args.family == "pinhole_scan") {
        check(gs_gen_pinhole_scan(args.n, &raw));
    } else if (args.family == "speckle") {
        check(gs_gen_sandpaper_speckle(args.J, args.n, args.fov_mm, args.seed,
                                       args.seed_label.c_str(), &raw));
    } else {
        throw ApiError(GS_E_INVALID_ARGUMENT,
                       "unknown family '" + args.family +
                           "' (expected random_binary, random_gray, hadamard, ura_scan, "
                           "pinhole_scan, or speckle)");
    }
    EnsemblePtr ens = wrap(raw);

    if (args.sigma_g > 0.0) {
        GsEnsemble* blurred = nullptr;
        check(gs_blur_masks(ens.get(), args.sigma_g, &blurred));
        ens = wrap(blurred);
    }

    ensure_dir(args.out_dir);
    int n = 0, J = 0, family = 0;
    double mu_A = 0.0, sigma_A = 0.0, gamma = 0.0, constant_sum = 0.0;
    int has_constant_sum = 0;
    check(gs_ensemble_n(ens.get(), &n));
    check(gs_ensemble_count(ens.get(), &J));
    check(gs_ensemble_family(ens.get(), &family));
    check(gs_ensemble_stats(ens.get(), &mu_A, &sigma_A, &has_constant_sum, &constant_sum));
    check(gs_compute_gamma(ens.get(), &gamma));
    const char* family_name = nullptr;
    check(gs_mask_family_name(family, &family_name));

    double pitch = 0.0;
    for (int j = 0; j < J; ++j) {
        GsImage* img = nullptr;
        check(gs_ensemble_mask(ens.get(), j, &img));
        const ImagePtr mask = wrap(img);
        if (j == 0) check(gs_image_pitch_mm(mask.get(), &pitch));
        write_image(args.out_dir + "/" + mask_file_name(j), mask.get(), 0.0, 1.0);
    }

    json manifest{{"kind", "masks"},
                  {"family", family_name},
                  {"n", n},
                  {"J", J},
                  {"mu_A", mu_A},
                  {"sigma_A", sigma_A},
                  {"gamma", gamma},
                  {"pitch_mm", pitch},
                  {"seed", args.seed},
                  {"seed_label", args.seed_label}};
    if (has_constant_sum) manifest["constant_sum"] = constant_sum;
    if (args.sigma_g > 0.0) manifest["sigma_g_px"] = args.sigma_g;

    if (args.g2) {
        double g2_max = 0.0, fwhm = 0.0;
        check(gs_g2_profile(ens.get(), &g2_max, &fwhm));
        manifest["g2_max"] = g2_max;
        manifest["g2_fwhm_mm"] = fwhm;
        int count = 0;
        check(gs_g2_values(ens.get(), nullptr, nullptr, 0, &count));
        std::vector<double> radius(count), value(count);
        check(gs_g2_values(ens.get(), radius.data(), value.data(), count, &count));
        std::string csv = "radius_mm,g2\n";
        for (int i = 0; i < count; ++i) {
            csv += format_double(radius[i]);
            csv += ',';
            csv += format_double(value[i]);
            csv += '\n';
        }
        write_text(args.out_dir + "/g2.csv", csv);
    }
    write_manifest(args.out_dir, manifest);
}

void cmd_simulate(const SimulateArgs& args) {
    EnsemblePtr ens = load_ensemble(args.masks_dir);
    int n = 0, J = 0;
    check(gs_ensemble_n(ens.get(), &n));
    check(gs_ensemble_count(ens.get(), &J));

    const ImagePtr object = make_object(args, n);

    GsBuckets* expected_raw = nullptr;
    check(gs_expected_buckets(object.get(), ens.get(), args.flux_B, args.t0_s, args.pitch_mm,
                              &expected_raw));
    BucketsPtr buckets = wrap(expected_raw);

    int kind = GS_NOISE_NONE;
    double sigma_p = 1.0, sigma_m = 0.0;
    parse_noise(args.noise, kind, sigma_p, sigma_m);
    if (kind != GS_NOISE_NONE) {
        GsBuckets* noisy = nullptr;
        check(gs_apply_noise(buckets.get(), kind, sigma_p, sigma_m, args.seed,
                             args.seed_label.c_str(), &noisy));
        buckets = wrap(noisy);
    }

    ensure_dir(args.out_dir);
    write_buckets_csv(args.out_dir + "/buckets.csv", buckets.get());
    write_image(args.out_dir + "/object.pgm", object.get(), 0.0, 1.0);

    double photon_scale = 0.0, exposure_s = 0.0;
    check(gs_buckets_photon_scale(buckets.get(), &photon_scale));
    check(gs_buckets_exposure_s(buckets.get(), &exposure_s));
    json manifest{{"kind", "buckets"},
                  {"J", J},
                  {"n", n},
                  {"object", args.object},
                  {"flux_B", args.flux_B},
                  {"t0_s", args.t0_s},
                  {"exposure_s", exposure_s},
                  {"photon_scale", photon_scale},
                  {"noise", {{"kind", noise_kind_text(kind)},
                             {"sigma_p", sigma_p},
                             {"sigma_m", sigma_m}}},
                  {"seed", args.seed},
                  {"seed_label", args.seed_label},
                  {"masks_dir", args.masks_dir}};
    write_manifest(args.out_dir, manifest);
}

void cmd_reconstruct(const ReconstructArgs& args) {
    EnsemblePtr ens = load_ensemble(args.masks_dir);
    BucketsPtr buckets = load_buckets(args.buckets_dir);

    GsImage* raw = nullptr;
    if (args.method == "xc") {
        check(gs_xc(ens.get(), buckets.get(), &raw));
    } else if (args.method == "scaled_xc") {
        check(gs_scaled_xc(ens.get(), buckets.get(), &raw));
    } else if (args.method == "landweber") {
        check(gs_landweber(ens.get(), buckets.get(), args.alpha, args.iterations, &raw));
    } else if (args.method == "pinv") {
        check(gs_pinv_recon(ens.get(), buckets.get(), args.max_pixels, args.ridge, &raw));
    } else {
        throw ApiError(GS_E_INVALID_ARGUMENT,
                       "unknown method '" + args.method +
                           "' (expected xc, scaled_xc, landweber, or pinv)");
    }
    const ImagePtr recon = wrap(raw);

    ensure_dir(args.out_dir);
    write_image(args.out_dir + "/recon.pgm", recon.get(), 0.0, 0.0); // auto window

    json manifest{{"kind", "recon"},
                  {"method", args.method},
                  {"masks_dir", args.masks_dir},
                  {"buckets_dir", args.buckets_dir},
                  {"image", image_summary(recon.get())}};
    if (args.method == "landweber") {
        manifest["alpha"] = args.alpha;
        manifest["iterations"] = args.iterations;
    }
    if (args.method == "pinv") {
        manifest["max_pixels"] = args.max_pixels;
        manifest["ridge_scale"] = args.ridge;
    }
    if (!args.reference_pgm.empty()) {
        GsImage* ref_raw = nullptr;
        check(gs_image_read_pgm16(args.reference_pgm.c_str(), &ref_raw, nullptr, nullptr));
        const ImagePtr reference = wrap(ref_raw);
        double rmse = 0.0, snr = 0.0;
        check(gs_rmse_snr(recon.get(), reference.get(), &rmse, &snr));
        manifest["reference"] = args.reference_pgm;
        manifest["rmse"] = rmse;
        manifest["snr"] = snr;
    }
    write_manifest(args.out_dir, manifest);
}

void cmd_psf(const PsfArgs& args) {
    EnsemblePtr ens = load_ensemble(args.masks_dir);

    GsImage* raw = nullptr;
    check(gs_psf(ens.get(), &raw));
    const ImagePtr response = wrap(raw);

    ensure_dir(args.out_dir);
    write_image(args.out_dir + "/psf.pgm", response.get(), 0.0, 0.0);

    double gamma = 0.0;
    check(gs_compute_gamma(ens.get(), &gamma));
    json manifest{{"kind", "psf"},
                  {"masks_dir", args.masks_dir},
                  {"gamma", gamma},
                  {"image", image_summary(response.get())}};

    if (args.star_x >= 0 && args.star_y >= 0) {
        GsImage* g_raw = nullptr;
        check(gs_greens(ens.get(), args.star_x, args.star_y, &g_raw));
        const ImagePtr response_at = wrap(g_raw);
        write_image(args.out_dir + "/greens.pgm", response_at.get(), 0.0, 0.0);
        manifest["star"] = {{"x", args.star_x}, {"y", args.star_y}};
    }
    write_manifest(args.out_dir, manifest);
}

void cmd_sweep(const SweepArgs& args) {
    const ConfigFile config = ConfigFile::parse_file(args.config_path);

    GsSweepSpec spec;
    check(gs_sweep_spec_defaults(&spec));

    const std::string sweep_name = config.get_string("sweep_name", "sweep");
    const std::string varied_param = config.get_string("varied_param");
    spec.sweep_name = sweep_name.c_str();
    spec.varied_param = varied_param.c_str();

    const std::vector<double> values = config.get_double_list("values");
    spec.values = values.data();
    spec.n_values = static_cast<int>(values.size());

    spec.J = static_cast<int>(config.get_int("J", spec.J));
    spec.n = static_cast<int>(config.get_int("n", spec.n));
    spec.mu_A = config.get_double("mu_A", spec.mu_A);
    spec.sigma_A = config.get_double("sigma_A", spec.sigma_A);
    spec.sigma_g_px = config.get_double("sigma_g", spec.sigma_g_px);

    std::vector<int> families;
    if (config.has("families")) {
        for (const std::string& name : config.get_string_list("families")) {
            int family = 0;
            check(gs_mask_family_from_name(name.c_str(), &family));
            families.push_back(family);
        }
        spec.families = families.data();
        spec.n_families = static_cast<int>(families.size());
    }

    std::vector<GsNoiseSpec> noises;
    if (config.has("noise")) {
        for (const std::string& text : config.get_string_list("noise")) {
            GsNoiseSpec ns{GS_NOISE_NONE, 1.0, 0.0};
            parse_noise(text, ns.kind, ns.sigma_p, ns.sigma_m);
            noises.push_back(ns);
        }
        spec.noises = noises.data();
        spec.n_noises = static_cast<int>(noises.size());
    }

    spec.seeds = static_cast<int>(config.get_int("seeds", spec.seeds));
    spec.root_seed = config.get_uint64("root_seed", spec.root_seed);
    const std::string root_label = config.get_string("root_label", "sweep");
    spec.root_label = root_label.c_str();

    const std::string budget = config.get_string("budget_mode", "noise_free");
    if (budget == "noise_free") {
        spec.budget_mode = GS_BUDGET_NOISE_FREE;
    } else if (budget == "constant_t0") {
        spec.budget_mode = GS_BUDGET_CONSTANT_T0;
    } else if (budget == "constant_tau") {
        spec.budget_mode = GS_BUDGET_CONSTANT_TAU;
    } else {
        throw ConfigError(config.name() + ": key 'budget_mode': unknown mode '" + budget +
                          "' (expected noise_free, constant_t0, or constant_tau)");
    }
    spec.flux_B = config.get_double("flux_B", spec.flux_B);
    spec.t0_s = config.get_double("t0", spec.t0_s);
    spec.tau_s = config.get_double("tau", spec.tau_s);
    spec.pitch_mm = config.get_double("pitch", spec.pitch_mm);

    const std::string object = config.get_string("object", "uniform");
    if (object == "uniform") {
        spec.object_kind = GS_OBJECT_UNIFORM_RANDOM;
    } else if (object == "stencil") {
        spec.object_kind = GS_OBJECT_TWO_LEVEL_STENCIL;
    } else {
        throw ConfigError(config.name() + ": key 'object': unknown object '" + object +
                          "' (expected uniform or stencil)");
    }
    spec.mu_T = config.get_double("mu_T", spec.mu_T);
    spec.sigma_T = config.get_double("sigma_T", spec.sigma_T);

    const std::string recon = config.get_string("recon", "scaled_xc");
    if (recon == "xc") {
        spec.recon = GS_RECON_XC;
    } else if (recon == "scaled_xc") {
        spec.recon = GS_RECON_SCALED_XC;
    } else if (recon == "landweber") {
        spec.recon = GS_RECON_LANDWEBER;
    } else if (recon == "pinv") {
        spec.recon = GS_RECON_PINV;
    } else {
        throw ConfigError(config.name() + ": key 'recon': unknown method '" + recon +
                          "' (expected xc, scaled_xc, landweber, or pinv)");
    }
    spec.landweber_alpha = config.get_double("landweber_alpha", spec.landweber_alpha);
    spec.landweber_iterations =
        static_cast<int>(config.get_int("landweber_iterations", spec.landweber_iterations));

    config.fail_on_unused();

    GsRecords* raw = nullptr;
    check(gs_run_sweep(&spec, &raw));
    const RecordsPtr records = wrap(raw);

    ensure_dir(args.out_dir);
    check(gs_records_write_csv(records.get(), (args.out_dir + "/sweep.csv").c_str()));

    int count = 0;
    check(gs_records_count(records.get(), &count));
    json manifest{{"kind", "sweep"},
                  {"sweep_name", sweep_name},
                  {"varied_param", varied_param},
                  {"records", count},
                  {"config", config.canonical()}};
    write_manifest(args.out_dir, manifest);
}

void cmd_zhang(const ZhangArgs& args) {
    int experiment = 0;
    if (args.experiment == "i" || args.experiment == "1") {
        experiment = GS_ZHANG_I;
    } else if (args.experiment == "ii" || args.experiment == "2") {
        experiment = GS_ZHANG_II;
    } else if (args.experiment == "iii" || args.experiment == "3") {
        experiment = GS_ZHANG_III;
    } else {
        throw ApiError(GS_E_INVALID_ARGUMENT,
                       "unknown experiment '" + args.experiment +
                           "' (expected i, ii, or iii)");
    }

    GsZhang* raw = nullptr;
    check(gs_run_zhang(experiment, args.shutter ? 1 : 0, args.seed, args.seed_label.c_str(),
                       args.J, &raw));
    const ZhangPtr result = wrap(raw);

    ensure_dir(args.out_dir);
    GsImage* img = nullptr;
    check(gs_zhang_recon(result.get(), &img));
    const ImagePtr recon = wrap(img);
    write_image(args.out_dir + "/recon.pgm", recon.get(), 0.0, 0.0);

    check(gs_zhang_reference(result.get(), &img));
    const ImagePtr reference = wrap(img);
    write_image(args.out_dir + "/reference.pgm", reference.get(), 0.0, 0.0);

    check(gs_zhang_sample_frame(result.get(), &img));
    const ImagePtr sample = wrap(img);
    write_image(args.out_dir + "/sample_frame.pgm", sample.get(), 0.0, 0.0);

    GsBuckets* buckets_raw = nullptr;
    check(gs_zhang_buckets(result.get(), &buckets_raw));
    const BucketsPtr buckets = wrap(buckets_raw);
    write_buckets_csv(args.out_dir + "/buckets.csv", buckets.get());

    double r = 0.0, r_control = 0.0, t0_s = 0.0;
    check(gs_zhang_r(result.get(), &r, &r_control));
    check(gs_zhang_t0_s(result.get(), &t0_s));
    GsCcdConfig ccd{};
    check(gs_zhang_ccd(result.get(), &ccd));

    json manifest{{"kind", "zhang"},
                  {"experiment", args.experiment},
                  {"shutter", args.shutter},
                  {"J", args.J},
                  {"seed", args.seed},
                  {"seed_label", args.seed_label},
                  {"t0_s", t0_s},
                  {"r", r},
                  {"r_control", r_control},
                  {"ccd", {{"rows", ccd.rows},
                           {"cols", ccd.cols},
                           {"readout_s", ccd.readout_s},
                           {"binning", ccd.binning},
                           {"cleared_before_exposure", ccd.cleared_before_exposure != 0},
                           {"rotation_deg", ccd.rotation_deg}}}};
    write_manifest(args.out_dir, manifest);
}

} // namespace ghostsim_cli
