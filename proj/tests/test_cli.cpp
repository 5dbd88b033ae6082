#include "doctest.h"
#include "varden/image_io.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

using namespace varden;

namespace {

const std::string kDir = "/tmp/varden_cli_test";

std::string path_of(const std::string& name) {
    std::filesystem::create_directories(kDir);
    return kDir + "/" + name;
}

// run the CLI with stdout/stderr captured; returns the exit status
int run_cli(const std::string& args, const std::string& tag) {
    const std::string cmd = std::string("'") + VARDEN_CLI_PATH + "' " + args + " >'" +
                            path_of(tag + ".out") + "' 2>'" + path_of(tag + ".err") +
                            "'";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

Image two_level_phantom() {
    Image im(8, 8, 1.0);
    for (int i = 2; i < 6; ++i)
        for (int j = 3; j < 8; ++j) im.at(i, j) = 3.0;
    return im;
}

// deterministic noisy fixture shared by several cases; safe to regenerate
std::string ensure_noisy() {
    const std::string clean = path_of("clean.img");
    image_write_float(clean, two_level_phantom());
    const std::string noisy = path_of("noisy.img");
    const int code = run_cli("noise --model poisson-logtv --in '" + clean +
                                 "' --out '" + noisy + "' --t 25 --seed 7",
                             "fixture");
    REQUIRE(code == 0);
    return noisy;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("noise then denoise round trip with sidecar") {
    const std::string clean = path_of("clean.img");
    const std::string noisy = ensure_noisy();
    REQUIRE(std::filesystem::exists(noisy));
    REQUIRE(std::filesystem::exists(noisy + ".x"));
    REQUIRE(std::filesystem::exists(noisy + ".meta"));

    // observed image is exactly x/t, and counts are integers
    const Image observed = image_read(noisy);
    const Image x = image_read(noisy + ".x");
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(observed.data[i] == x.data[i] / 25.0);
        CHECK(x.data[i] == std::floor(x.data[i]));
    }

    // determinism: the same manifest produces byte-identical output
    const std::string noisy2 = path_of("noisy_again.img");
    CHECK(run_cli("noise --model poisson-logtv --in '" + clean + "' --out '" + noisy2 +
                      "' --t 25 --seed 7",
                  "noise2") == 0);
    CHECK(read_text(noisy) == read_text(noisy2));
    const std::string noisy3 = path_of("noisy_seed8.img");
    CHECK(run_cli("noise --model poisson-logtv --in '" + clean + "' --out '" + noisy3 +
                      "' --t 25 --seed 8",
                  "noise3") == 0);
    CHECK(read_text(noisy) != read_text(noisy3));

    // denoise picks t and the exact x from the sidecar
    const std::string restored = path_of("restored.img");
    const std::string report = path_of("report.txt");
    CHECK(run_cli("denoise --model poisson-logtv --in '" + noisy + "' --out '" +
                      restored + "' --alpha 0.6 --report '" + report + "'",
                  "den1") == 0);
    const auto kv = parse_kv(read_text(report));
    CHECK(kv.at("converged") == "1");
    CHECK(kv.at("model") == "poisson-logtv");
    CHECK(std::stod(kv.at("t")) == 25.0);

    // the reported residual norm must match a recomputation from the files
    const Image vbar = image_read(restored);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = x.data[i] / 25.0 - vbar.data[i];
        acc += r * r;
        CHECK(vbar.data[i] > 0.0);
    }
    const double recomputed = std::sqrt(acc);
    CHECK(std::fabs(std::stod(kv.at("residual_l2")) - recomputed) <=
          1e-12 * (1.0 + recomputed));

    // display residual parses as an 8-bit image of the right shape
    const Image disp = image_read(restored + ".residual.pgm");
    CHECK(disp.rows == 8);
    CHECK(disp.cols == 8);
}

TEST_CASE("denoise without a sidecar treats the input as exact data") {
    Image x(2, 3, {4.4, 8.4, 12.0, 4.0, 8.0, 12.4});
    const std::string xp = path_of("raw_x.img");
    image_write_float(xp, x);
    const std::string out = path_of("raw_restored.img");
    const std::string report = path_of("raw_report.txt");
    CHECK(run_cli("denoise --model mult-invtv --in '" + xp + "' --out '" + out +
                      "' --t 4 --alpha 0.3 --report '" + report + "'",
                  "den2") == 0);
    const auto kv = parse_kv(read_text(report));
    CHECK(kv.at("converged") == "1");
    CHECK(kv.count("objective_additive") == 1);
    const Image vbar = image_read(out);
    for (double v : vbar.data) CHECK(v > 0.0);

    CHECK(run_cli("denoise --model mult-invtv --in '" + xp + "' --out '" + out +
                      "' --t -1 --alpha 0.3",
                  "den3") == 1);
}

TEST_CASE("noiseless constant input gives a flat gray residual image") {
    const Image c(4, 5, 2.0 * 1.7);  // x = t*c with t = 2
    const std::string xp = path_of("const_x.img");
    image_write_float(xp, c);
    const std::string out = path_of("const_restored.img");
    CHECK(run_cli("denoise --model poisson-logtv --in '" + xp + "' --out '" + out +
                      "' --t 2 --alpha 0.4",
                  "den4") == 0);
    const Image disp = image_read(out + ".residual.pgm");
    for (double v : disp.data) CHECK(v == 128.0);  // 0.5 offset, half-to-even
}

TEST_CASE("exit status contract") {
    CHECK(run_cli("", "e0") == 1);
    CHECK(run_cli("frobnicate", "e1") == 1);
    CHECK(run_cli("denoise --in only", "e2") == 1);
    CHECK(run_cli("--help", "e3") == 0);
    CHECK(run_cli("noise --model poisson-logtv --in '" + path_of("nope.img") +
                      "' --out '" + path_of("o.img") + "'",
                  "e4") == 1);

    // gamma observation counts must be integers
    const std::string clean = path_of("clean.img");
    image_write_float(clean, two_level_phantom());
    CHECK(run_cli("noise --model mult-invtv --in '" + clean + "' --out '" +
                      path_of("g.img") + "' --t 2.5",
                  "e5") == 1);
    CHECK(run_cli("noise --model mult-invtv --in '" + clean + "' --out '" +
                      path_of("g.img") + "' --t 3 --seed 5",
                  "e6") == 0);

    // a starved solver exits 2 and still reports what it knows
    const std::string report = path_of("starved_report.txt");
    CHECK(run_cli("denoise --model poisson-logtv --in '" + ensure_noisy() +
                      "' --out '" + path_of("s.img") + "' --alpha 0.6 --max-iter 2" +
                      " --report '" + report + "'",
                  "e7") == 2);
    CHECK(parse_kv(read_text(report)).at("converged") == "0");
}

TEST_CASE("verify subcommand emits a CSV battery report") {
    const std::string csv = path_of("bregman.csv");
    CHECK(run_cli("verify --suite bregman --report '" + csv + "'", "v1") == 0);
    CHECK(read_text(path_of("v1.out")).find("PASS bregman") != std::string::npos);

    const std::string text = read_text(csv);
    CHECK(text.rfind("suite,case,residual,tol,pass\n", 0) == 0);
    // every emitted row passes
    CHECK(text.find(",0\n") == std::string::npos);
    std::size_t rows = 0;
    for (char ch : text)
        if (ch == '\n') ++rows;
    CHECK(rows >= 600);

    CHECK(run_cli("verify --suite nonsense", "v2") == 1);
}

TEST_CASE("hj-eval prints a coherent probe report") {
    Image x(1, 2, {2.1, 1.3});
    const std::string xp = path_of("hj_x.img");
    image_write_float(xp, x);
    CHECK(run_cli("hj-eval --model poisson-logtv --in '" + xp +
                      "' --t 1.5 --alpha 0.08 --fd-step 1e-3",
                  "hj1") == 0);
    const auto kv = parse_kv(read_text(path_of("hj1.out")));
    CHECK(std::fabs(std::stod(kv.at("pde_residual_S"))) <= 1e-3);
    CHECK(std::fabs(std::stod(kv.at("forms_gap"))) <= 1e-9);
    CHECK(std::fabs(std::stod(kv.at("moreau_residual"))) <= 1e-8);
    CHECK(kv.count("v_bar") == 1);
    CHECK(kv.count("v_from_S") == 1);
    CHECK(kv.count("grad_x_F") == 1);
}

TEST_CASE("large TV weight drives the restoration to the preserved mean") {
    const std::string noisy = ensure_noisy();
    const std::string out = path_of("flat_restored.img");
    const std::string report = path_of("flat_report.txt");
    CHECK(run_cli("denoise --model poisson-tv --in '" + noisy + "' --out '" + out +
                      "' --alpha 400 --report '" + report + "'",
                  "den5") == 0);
    const auto kv = parse_kv(read_text(report));
    const double mo = std::stod(kv.at("mean_observed"));
    const double mr = std::stod(kv.at("mean_restored"));
    CHECK(std::fabs(mr - mo) <= 0.02 * std::fabs(mo));

    // and the image is essentially flat
    const Image vbar = image_read(out);
    double lo = 1e300, hi = -1e300;
    for (double v : vbar.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo <= 1e-3 * std::fabs(mo));
}

}  // TEST_SUITE
