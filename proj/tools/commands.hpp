// SPDX-License-Identifier: Apache-2.0
//
// CLI subcommand implementations.  Every command talks to the library
// exclusively through the C API and reports failures by throwing ApiError
// (library status) or ghostsim_cli::ConfigError (config file problems);
// main() maps those to exit codes.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ghostsim_cli {

/// A C API call failed; carries the status code and the library message.
class ApiError : public std::runtime_error {
public:
    ApiError(int status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

struct MasksArgs {
    std::string family = "random_binary";
    int n = 64;
    int J = 256;
    int p = 31; ///< grid side for the redundant-array scan (prime)
    double mu_A = 0.5;
    double sigma_A = 0.5;
    double sigma_g = 0.0; ///< > 0 blurs the generated masks
    double fov_mm = 5.0;  ///< speckle field of view
    uint64_t seed = 1;
    std::string seed_label = "masks";
    bool g2 = false; ///< also compute the correlation profile
    std::string out_dir;
};
void cmd_masks(const MasksArgs& args);

struct SimulateArgs {
    std::string masks_dir;
    std::string object = "uniform"; ///< uniform | stencil | xgi | <path.pgm>
    double mu_T = 0.5;
    double sigma_T = 0.28867513459481287;
    double frac_hi = 0.29;
    double lo = 0.25;
    double hi = 0.75;
    double rotation_deg = 0.0;
    double flux_B = 4.1e5;
    double t0_s = 0.01;
    double pitch_mm = 0.0; ///< <= 0 selects the mask pitch
    std::string noise = "none"; ///< none | poisson[:sp] | gaussian:sm | both:sp:sm
    uint64_t seed = 2;
    std::string seed_label = "noise";
    std::string out_dir;
};
void cmd_simulate(const SimulateArgs& args);

struct ReconstructArgs {
    std::string masks_dir;
    std::string buckets_dir;
    std::string method = "scaled_xc"; ///< xc | scaled_xc | landweber | pinv
    double alpha = 1.0;
    int iterations = 200;
    int max_pixels = 4096;
    double ridge = 1e-10;
    std::string reference_pgm; ///< optional; adds rmse/snr to the manifest
    std::string out_dir;
};
void cmd_reconstruct(const ReconstructArgs& args);

struct PsfArgs {
    std::string masks_dir;
    int star_x = -1; ///< >= 0 also writes the point response at (x, y)
    int star_y = -1;
    std::string out_dir;
};
void cmd_psf(const PsfArgs& args);

struct SweepArgs {
    std::string config_path;
    std::string out_dir;
};
void cmd_sweep(const SweepArgs& args);

struct ZhangArgs {
    std::string experiment = "ii"; ///< i | ii | iii (or 1 | 2 | 3)
    bool shutter = true;
    uint64_t seed = 7;
    std::string seed_label = "zhang";
    int J = 10000;
    std::string out_dir;
};
void cmd_zhang(const ZhangArgs& args);

} // namespace ghostsim_cli
