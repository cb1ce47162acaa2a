// SPDX-License-Identifier: Apache-2.0
//
// ghostsim command-line interface.  The CLI drives the shared library
// through its C API; each subcommand writes its artifacts (PGM images, CSV
// tables, manifest.json) into a target directory.
//
// Exit codes: 0 success, 2 usage/config/argument errors, 3 numeric
// failures, 4 I/O or allocation failures, 1 anything else.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "ghostsim/ghostsim.h"

namespace {

int exit_code_for(int status) {
    switch (status) {
        case GS_OK: return 0;
        case GS_E_INVALID_ARGUMENT:
        case GS_E_DIMENSION_MISMATCH: return 2;
        case GS_E_NUMERIC: return 3;
        case GS_E_IO:
        case GS_E_NOMEM: return 4;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ghost-imaging simulation toolkit"};
    app.set_version_flag("--version", gs_version());
    app.require_subcommand(1);

    ghostsim_cli::MasksArgs masks;
    CLI::App* masks_cmd = app.add_subcommand("masks", "generate an illumination mask ensemble");
    masks_cmd->add_option("--family", masks.family,
                          "random_binary | random_gray | hadamard | ura_scan | pinhole_scan | "
                          "speckle")
        ->capture_default_str();
    masks_cmd->add_option("-n,--side", masks.n, "mask side in pixels")->capture_default_str();
    masks_cmd->add_option("-J,--count", masks.J, "number of masks")->capture_default_str();
    masks_cmd->add_option("-p,--prime", masks.p, "grid side for ura_scan (prime)")
        ->capture_default_str();
    masks_cmd->add_option("--mu-a", masks.mu_A, "mask mean")->capture_default_str();
    masks_cmd->add_option("--sigma-a", masks.sigma_A, "mask std (random_gray)")
        ->capture_default_str();
    masks_cmd->add_option("--sigma-g", masks.sigma_g, "Gaussian blur std in pixels (0 = none)")
        ->capture_default_str();
    masks_cmd->add_option("--fov", masks.fov_mm, "speckle field of view in mm")
        ->capture_default_str();
    masks_cmd->add_option("--seed", masks.seed, "random seed")->capture_default_str();
    masks_cmd->add_option("--seed-label", masks.seed_label, "seed stream label")
        ->capture_default_str();
    masks_cmd->add_flag("--g2", masks.g2, "also compute the correlation profile");
    masks_cmd->add_option("-o,--out", masks.out_dir, "output directory")->required();

    ghostsim_cli::SimulateArgs simulate;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "simulate bucket measurements for an object");
    simulate_cmd->add_option("--masks", simulate.masks_dir, "mask directory from 'masks'")
        ->required();
    simulate_cmd->add_option("--object", simulate.object,
                             "uniform | stencil | xgi | <path.pgm>")
        ->capture_default_str();
    simulate_cmd->add_option("--mu-t", simulate.mu_T, "object mean (uniform)")
        ->capture_default_str();
    simulate_cmd->add_option("--sigma-t", simulate.sigma_T, "object std (uniform)")
        ->capture_default_str();
    simulate_cmd->add_option("--frac-hi", simulate.frac_hi, "high-pixel fraction (stencil)")
        ->capture_default_str();
    simulate_cmd->add_option("--lo", simulate.lo, "low level (stencil)")->capture_default_str();
    simulate_cmd->add_option("--hi", simulate.hi, "high level (stencil)")->capture_default_str();
    simulate_cmd->add_option("--rotation", simulate.rotation_deg, "rotation in degrees (xgi)")
        ->capture_default_str();
    simulate_cmd->add_option("--flux", simulate.flux_B, "source flux in photons/s/mm^2")
        ->capture_default_str();
    simulate_cmd->add_option("--t0", simulate.t0_s, "per-exposure time in seconds")
        ->capture_default_str();
    simulate_cmd->add_option("--pitch", simulate.pitch_mm, "pixel pitch in mm (0 = mask pitch)")
        ->capture_default_str();
    simulate_cmd->add_option("--noise", simulate.noise,
                             "none | poisson[:sp] | gaussian:sm | both:sp:sm")
        ->capture_default_str();
    simulate_cmd->add_option("--seed", simulate.seed, "noise seed")->capture_default_str();
    simulate_cmd->add_option("--seed-label", simulate.seed_label, "seed stream label")
        ->capture_default_str();
    simulate_cmd->add_option("-o,--out", simulate.out_dir, "output directory")->required();

    ghostsim_cli::ReconstructArgs reconstruct;
    CLI::App* reconstruct_cmd =
        app.add_subcommand("reconstruct", "reconstruct an object from bucket measurements");
    reconstruct_cmd->add_option("--masks", reconstruct.masks_dir, "mask directory")->required();
    reconstruct_cmd->add_option("--buckets", reconstruct.buckets_dir,
                                "bucket directory from 'simulate'")
        ->required();
    reconstruct_cmd->add_option("--method", reconstruct.method,
                                "xc | scaled_xc | landweber | pinv")
        ->capture_default_str();
    reconstruct_cmd->add_option("--alpha", reconstruct.alpha, "landweber relaxation in (0, 1]")
        ->capture_default_str();
    reconstruct_cmd->add_option("--iterations", reconstruct.iterations, "landweber iterations")
        ->capture_default_str();
    reconstruct_cmd->add_option("--max-pixels", reconstruct.max_pixels,
                                "pinv size guard (n^2 limit)")
        ->capture_default_str();
    reconstruct_cmd->add_option("--ridge", reconstruct.ridge, "pinv ridge scale")
        ->capture_default_str();
    reconstruct_cmd->add_option("--reference", reconstruct.reference_pgm,
                                "reference PGM for rmse/snr reporting");
    reconstruct_cmd->add_option("-o,--out", reconstruct.out_dir, "output directory")->required();

    ghostsim_cli::PsfArgs psf;
    CLI::App* psf_cmd =
        app.add_subcommand("psf", "compute the point-spread function of a mask ensemble");
    psf_cmd->add_option("--masks", psf.masks_dir, "mask directory")->required();
    psf_cmd->add_option("--star-x", psf.star_x, "also write the point response at this x");
    psf_cmd->add_option("--star-y", psf.star_y, "point response y coordinate");
    psf_cmd->add_option("-o,--out", psf.out_dir, "output directory")->required();

    ghostsim_cli::SweepArgs sweep;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run a parameter sweep described by a config file");
    sweep_cmd->add_option("-c,--config", sweep.config_path, "key = value config file")
        ->required();
    sweep_cmd->add_option("-o,--out", sweep.out_dir, "output directory")->required();

    ghostsim_cli::ZhangArgs zhang;
    CLI::App* zhang_cmd = app.add_subcommand(
        "zhang", "replicate the shutter-free tabletop CCD experiment");
    zhang_cmd->add_option("--experiment", zhang.experiment, "i | ii | iii")
        ->capture_default_str();
    zhang_cmd->add_flag("--shutter,!--no-shutter", zhang.shutter,
                        "shield the source during read-out");
    zhang_cmd->add_option("--seed", zhang.seed, "random seed")->capture_default_str();
    zhang_cmd->add_option("--seed-label", zhang.seed_label, "seed stream label")
        ->capture_default_str();
    zhang_cmd->add_option("--frames", zhang.J, "number of speckle exposures")
        ->capture_default_str();
    zhang_cmd->add_option("-o,--out", zhang.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        app.exit(e);
        return 2;
    }

    try {
        if (masks_cmd->parsed()) ghostsim_cli::cmd_masks(masks);
        if (simulate_cmd->parsed()) ghostsim_cli::cmd_simulate(simulate);
        if (reconstruct_cmd->parsed()) ghostsim_cli::cmd_reconstruct(reconstruct);
        if (psf_cmd->parsed()) ghostsim_cli::cmd_psf(psf);
        if (sweep_cmd->parsed()) ghostsim_cli::cmd_sweep(sweep);
        if (zhang_cmd->parsed()) ghostsim_cli::cmd_zhang(zhang);
    } catch (const ghostsim_cli::ApiError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.status());
    } catch (const ghostsim_cli::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
