// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests for the ghostsim command line tool.  The binary under
// test is located through the GHOSTSIM_CLI environment variable (set by
// CTest); each case runs it as a subprocess in a scratch directory and
// inspects exit codes, emitted files, and manifest contents.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ghostsim/core.hpp"
#include "ghostsim/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("GHOSTSIM_CLI");
    REQUIRE_MESSAGE(p != nullptr, "GHOSTSIM_CLI must point at the ghostsim binary");
    return std::string(p);
}

/// Scratch directory for one test case, wiped on construction.
fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "ghostsim_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs `ghostsim <args>` with stdout/stderr captured to files.
RunResult run_cli(const std::string& args, const fs::path& dir) {
    fs::path out_file = dir / "stdout.txt";
    fs::path err_file = dir / "stderr.txt";
    std::string cmd = cli_path() + " " + args + " >" + out_file.string() + " 2>" + err_file.string();
    int rc = std::system(cmd.c_str());
    RunResult res;
#ifdef _WIN32
    res.exit_code = rc;
#else
    res.exit_code = WEXITSTATUS(rc);
#endif
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

json read_manifest(const fs::path& dir) {
    return json::parse(slurp(dir / "manifest.json"));
}

} // namespace

TEST_CASE("cli: version and argument errors") {
    fs::path dir = scratch("argerr");

    RunResult ver = run_cli("--version", dir);
    CHECK(ver.exit_code == 0);
    CHECK(ver.out.size() >= 5); // at least "x.y.z"

    // A subcommand is mandatory.
    RunResult none = run_cli("", dir);
    CHECK(none.exit_code == 2);

    RunResult bogus = run_cli("frobnicate", dir);
    CHECK(bogus.exit_code == 2);

    // Missing required --out.
    RunResult noout = run_cli("masks --family hadamard -n 4", dir);
    CHECK(noout.exit_code == 2);

    // Unknown mask family is rejected by the library with a message.
    RunResult fam = run_cli("masks --family nosuch -n 4 -o " + (dir / "m").string(), dir);
    CHECK(fam.exit_code == 2);
    CHECK(fam.err.find("nosuch") != std::string::npos);
}

TEST_CASE("cli: masks writes images and a manifest") {
    fs::path dir = scratch("masks");
    fs::path out = dir / "had";

    RunResult res = run_cli("masks --family hadamard -n 4 -o " + out.string(), dir);
    CHECK(res.exit_code == 0);

    json man = read_manifest(out);
    CHECK(man.at("kind") == "masks");
    CHECK(man.at("family") == "hadamard");
    CHECK(man.at("J") == 16);
    CHECK(man.at("n") == 4);
    CHECK(man.at("gamma").get<double>() == doctest::Approx(4.0));

    for (int j = 0; j < 16; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%05d.pgm", j);
        CAPTURE(j);
        REQUIRE(fs::exists(out / name));
    }
    CHECK_FALSE(fs::exists(out / "mask_00016.pgm"));

    // First mask of the orthogonal family is all ones; values survive the
    // [0, 1] quantization window exactly.
    ghostsim::Image m0 = ghostsim::read_pgm16((out / "mask_00000.pgm").string()).image;
    CHECK(m0.rows() == 4);
    CHECK(m0.cols() == 4);
    for (int i = 0; i < 16; ++i) CHECK(m0.data()[i] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("cli: mask generation is reproducible byte for byte") {
    fs::path dir = scratch("masks_repro");
    fs::path a = dir / "a";
    fs::path b = dir / "b";

    std::string args = "masks --family random_binary -n 8 -J 4 --seed 42 -o ";
    CHECK(run_cli(args + a.string(), dir).exit_code == 0);
    CHECK(run_cli(args + b.string(), dir).exit_code == 0);

    for (int j = 0; j < 4; ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%05d.pgm", j);
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("cli: simulate then reconstruct recovers the scene") {
    fs::path dir = scratch("roundtrip");
    fs::path masks = dir / "masks";
    fs::path sim = dir / "sim";
    fs::path rec = dir / "rec";

    CHECK(run_cli("masks --family ura_scan -p 5 -o " + masks.string(), dir).exit_code == 0);

    RunResult s = run_cli("simulate --masks " + masks.string() +
                              " --object uniform --mu-t 0.5 --sigma-t 0.2 --noise none -o " +
                              sim.string(),
                          dir);
    CHECK(s.exit_code == 0);
    REQUIRE(fs::exists(sim / "buckets.csv"));
    REQUIRE(fs::exists(sim / "object.pgm"));

    std::string csv = slurp(sim / "buckets.csv");
    CHECK(csv.rfind("j,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 26); // header + 25 rows

    json sman = read_manifest(sim);
    CHECK(sman.at("kind") == "buckets");
    CHECK(sman.at("exposure_s").get<double>() == doctest::Approx(0.01));
    CHECK(sman.at("photon_scale").get<double>() > 0.0);

    RunResult r = run_cli("reconstruct --masks " + masks.string() + " --buckets " + sim.string() +
                              " --method scaled_xc --reference " + (sim / "object.pgm").string() +
                              " -o " + rec.string(),
                          dir);
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(rec / "recon.pgm"));

    // Noise-free scan data inverts exactly; the manifest error is bounded by
    // the 16-bit quantization of the reference image.
    json rman = read_manifest(rec);
    CHECK(rman.at("kind") == "recon");
    CHECK(rman.at("method") == "scaled_xc");
    CHECK(rman.at("rmse").get<double>() < 1e-4);
    CHECK(rman.at("snr").get<double>() > 1e3);

    ghostsim::Image recon = ghostsim::read_pgm16((rec / "recon.pgm").string()).image;
    ghostsim::Image object = ghostsim::read_pgm16((sim / "object.pgm").string()).image;
    REQUIRE(recon.rows() == 5);
    REQUIRE(recon.cols() == 5);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i)
        worst = std::max(worst, std::abs(recon.data()[i] - object.data()[i]));
    CHECK(worst < 2e-4);
}

TEST_CASE("cli: degenerate masks surface as a numeric error") {
    fs::path dir = scratch("degenerate");
    fs::path masks = dir / "flat";
    fs::path sim = dir / "sim";

    CHECK(run_cli("masks --family random_gray --sigma-a 0 -n 8 -J 16 -o " + masks.string(), dir)
              .exit_code == 0);
    CHECK(run_cli("simulate --masks " + masks.string() + " --noise none -o " + sim.string(), dir)
              .exit_code == 0);

    RunResult r = run_cli("reconstruct --masks " + masks.string() + " --buckets " + sim.string() +
                              " --method scaled_xc -o " + (dir / "rec").string(),
                          dir);
    CHECK(r.exit_code == 3);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli: missing inputs map to the I/O exit code") {
    fs::path dir = scratch("ioerr");
    RunResult r = run_cli("reconstruct --masks " + (dir / "nowhere").string() + " --buckets " +
                              (dir / "nowhere").string() + " -o " + (dir / "rec").string(),
                          dir);
    CHECK(r.exit_code == 4);
}

TEST_CASE("cli: noise syntax is validated") {
    fs::path dir = scratch("noise");
    fs::path masks = dir / "masks";
    CHECK(run_cli("masks --family random_binary -n 4 -J 8 -o " + masks.string(), dir).exit_code ==
          0);

    CHECK(run_cli("simulate --masks " + masks.string() + " --noise both:1:10 --seed 3 -o " +
                      (dir / "ok").string(),
                  dir)
              .exit_code == 0);
    CHECK(run_cli("simulate --masks " + masks.string() + " --noise sparkle -o " +
                      (dir / "bad").string(),
                  dir)
              .exit_code == 2);
}

TEST_CASE("cli: psf writes the averaged response and a point response") {
    fs::path dir = scratch("psf");
    fs::path masks = dir / "masks";
    fs::path out = dir / "psf";

    CHECK(run_cli("masks --family random_binary -n 8 -J 64 -o " + masks.string(), dir).exit_code ==
          0);
    RunResult r = run_cli(
        "psf --masks " + masks.string() + " --star-x 2 --star-y 3 -o " + out.string(), dir);
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "psf.pgm"));
    CHECK(fs::exists(out / "greens.pgm"));

    json man = read_manifest(out);
    CHECK(man.at("kind") == "psf");
    CHECK(man.at("star").at("x") == 2);
    CHECK(man.at("star").at("y") == 3);

    ghostsim::Image psf = ghostsim::read_pgm16((out / "psf.pgm").string()).image;
    CHECK(psf.rows() == 8);
    CHECK(psf.cols() == 8);
}

TEST_CASE("cli: sweep runs a config file and is deterministic") {
    fs::path dir = scratch("sweep");
    fs::path cfg = dir / "sweep.cfg";
    {
        std::ofstream out(cfg);
        out << "# tiny smoke sweep\n"
            << "sweep_name = cli_smoke\n"
            << "varied_param = J\n"
            << "values = 8, 16\n"
            << "n = 8\n"
            << "families = random_binary\n"
            << "noise = none\n"
            << "seeds = 2\n";
    }

    fs::path a = dir / "a";
    fs::path b = dir / "b";
    RunResult r1 = run_cli("sweep -c " + cfg.string() + " -o " + a.string(), dir);
    CHECK(r1.exit_code == 0);
    CHECK(run_cli("sweep -c " + cfg.string() + " -o " + b.string(), dir).exit_code == 0);

    std::string csv = slurp(a / "sweep.csv");
    CHECK(csv.rfind(ghostsim::kSweepCsvHeader, 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5); // header + 2 values x 2 seeds
    CHECK(csv == slurp(b / "sweep.csv"));

    json man = read_manifest(a);
    CHECK(man.at("kind") == "sweep");
    CHECK(man.at("sweep_name") == "cli_smoke");
    CHECK(man.at("records") == 4);
}

TEST_CASE("cli: config errors carry the offending location") {
    fs::path dir = scratch("badcfg");
    fs::path cfg = dir / "bad.cfg";
    {
        std::ofstream out(cfg);
        out << "varied_param = J\n"
            << "values = 8\n"
            << "frobnicator = 12\n";
    }
    RunResult r = run_cli("sweep -c " + cfg.string() + " -o " + (dir / "out").string(), dir);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("frobnicator") != std::string::npos);
    CHECK(r.err.find("3") != std::string::npos); // line number of the bad key
}

TEST_CASE("cli: camera replication command emits the full artifact set") {
    fs::path dir = scratch("zhang");
    fs::path out = dir / "z";

    RunResult r = run_cli("zhang --experiment ii --frames 120 --seed 11 -o " + out.string(), dir);
    CHECK(r.exit_code == 0);

    REQUIRE(fs::exists(out / "recon.pgm"));
    REQUIRE(fs::exists(out / "reference.pgm"));
    REQUIRE(fs::exists(out / "sample_frame.pgm"));
    REQUIRE(fs::exists(out / "buckets.csv"));

    ghostsim::Image recon = ghostsim::read_pgm16((out / "recon.pgm").string()).image;
    CHECK(recon.rows() == 32);
    CHECK(recon.cols() == 32);
    ghostsim::Image frame = ghostsim::read_pgm16((out / "sample_frame.pgm").string()).image;
    CHECK(frame.rows() == 163);
    CHECK(frame.cols() == 32);

    std::string csv = slurp(out / "buckets.csv");
    CHECK(csv.rfind("j,value\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 121);

    json man = read_manifest(out);
    CHECK(man.at("kind") == "zhang");
    CHECK(man.at("experiment") == "ii");
    CHECK(man.at("shutter") == true);
    CHECK(man.at("J") == 120);
    double r_corr = man.at("r").get<double>();
    CHECK(std::isfinite(r_corr));
    CHECK(r_corr >= -1.0);
    CHECK(r_corr <= 1.0);
    CHECK(std::isfinite(man.at("r_control").get<double>()));
}
