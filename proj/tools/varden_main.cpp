#include "varden/admm.hpp"
#include "varden/hj_verify.hpp"
#include "varden/image_io.hpp"
#include "varden/noise_sim.hpp"
#include "varden/verify_suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace varden;

// exit-status contract
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSolverFailure = 2;
constexpr int kVerifyFailure = 3;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string joined(const Image& im) {
    std::string s;
    for (std::size_t i = 0; i < im.size(); ++i) {
        if (i) s += ' ';
        s += fmt17(im.data[i]);
    }
    return s;
}

Ham ham_of_model(const std::string& model) {
    if (model == "poisson-logtv") return Ham::poisson_exp;
    if (model == "mult-invtv") return Ham::burg_neglog;
    throw Error("model " + model + " has no Hamiltonian backing");
}

NoiseKind kind_of_model(const std::string& model) {
    if (model == "poisson-logtv" || model == "poisson-tv") return NoiseKind::poisson;
    if (model == "mult-invtv" || model == "mult-logtv")
        return NoiseKind::gamma_multiplicative;
    throw Error("unknown model: " + model);
}

void emit_report(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& kv) {
    if (path.empty()) {
        for (const auto& [k, v] : kv) std::cout << k << '=' << v << '\n';
    } else {
        sidecar_write(path, kv);
    }
}

struct Manifest {
    std::string model;
    std::string in_path, out_path, report_path;
    double t = 1.0, alpha = 0.5, lambda = 1.0, tol = 1e-6, fd_step = 1e-3;
    std::uint64_t seed = 0;
    int max_iter = 50000;
    std::string suite = "all";
    bool t_given = false;
};

int cmd_noise(const Manifest& m) {
    const Image clean = image_read(m.in_path);
    NoiseSpec spec;
    spec.kind = kind_of_model(m.model);
    spec.t = m.t;
    spec.seed = m.seed;
    const Image x = spec.kind == NoiseKind::poisson ? poisson_corrupt(clean, spec)
                                                    : gamma_corrupt(clean, spec);
    Image observed(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) observed.data[i] = x.data[i] / m.t;
    image_write_float(m.out_path, observed);
    image_write_float(m.out_path + ".x", x);
    sidecar_write(m.out_path + ".meta",
                  {{"model", m.model},
                   {"kind", spec.kind == NoiseKind::poisson ? "poisson" : "gamma"},
                   {"t", fmt17(m.t)},
                   {"seed", std::to_string(m.seed)},
                   {"x_file", m.out_path + ".x"},
                   {"observed_is", "x_over_t"}});
    return kOk;
}

SolveReport dispatch_solver(const std::string& model, const Image& x,
                            const AdmmConfig& cfg) {
    if (model == "poisson-logtv") return poisson_logtv_denoise(x, cfg);
    if (model == "poisson-tv") return poisson_tv_denoise(x, cfg);
    if (model == "mult-invtv") return mult_invtv_denoise(x, cfg);
    if (model == "mult-logtv") return mult_logtv_denoise(x, cfg);
    throw Error("unknown model: " + model);
}

int cmd_denoise(const Manifest& m) {
    Image x;
    double t = m.t;
    const std::string meta_path = m.in_path + ".meta";
    if (std::filesystem::exists(meta_path)) {
        const auto kv = sidecar_read(meta_path);
        x = image_read(kv.at("x_file"));
        if (!m.t_given) t = std::stod(kv.at("t"));
    } else {
        // no sidecar: the input is taken as the exact data x
        x = image_read(m.in_path);
    }
    if (!(t > 0.0)) throw Error("denoise: t must be positive");

    AdmmConfig cfg;
    cfg.lambda = m.lambda;
    cfg.t = t;
    cfg.alpha = m.alpha;
    cfg.max_iter = m.max_iter;
    cfg.primal_tol = cfg.dual_tol = m.tol;

    std::vector<std::pair<std::string, std::string>> rep_kv = {
        {"model", m.model}, {"t", fmt17(t)},
        {"alpha", fmt17(m.alpha)}, {"lambda", fmt17(m.lambda)},
    };

    SolveReport rep;
    try {
        rep = dispatch_solver(m.model, x, cfg);
    } catch (const SolverError& e) {
        rep_kv.emplace_back("error", e.what());
        if (e.report) {
            rep_kv.emplace_back("iterations", std::to_string(e.report->iterations));
            rep_kv.emplace_back("converged", "0");
        }
        emit_report(m.report_path, rep_kv);
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }

    image_write_float(m.out_path, rep.v_bar);

    // residual display convention: x/t - v_bar, offset +0.5, clamped to [0,1]
    Image residual(x.rows, x.cols), display(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        residual.data[i] = x.data[i] / t - rep.v_bar.data[i];
        const double d = std::min(std::max(residual.data[i] + 0.5, 0.0), 1.0);
        display.data[i] = d * 255.0;
    }
    image_write_pgm(m.out_path + ".residual.pgm", display, 255, true);

    rep_kv.emplace_back("iterations", std::to_string(rep.iterations));
    rep_kv.emplace_back("converged", rep.converged ? "1" : "0");
    rep_kv.emplace_back("objective", fmt17(rep.obj_nonadditive));
    if (rep.obj_additive)
        rep_kv.emplace_back("objective_additive", fmt17(*rep.obj_additive));
    rep_kv.emplace_back("residual_l2", fmt17(norm2(residual)));
    rep_kv.emplace_back("mean_observed", fmt17(mean(x) / t));
    rep_kv.emplace_back("mean_restored", fmt17(mean(rep.v_bar)));
    rep_kv.emplace_back("restored_file", m.out_path);
    rep_kv.emplace_back("residual_display_file", m.out_path + ".residual.pgm");
    emit_report(m.report_path, rep_kv);
    return rep.converged ? kOk : kSolverFailure;
}

int cmd_verify(const Manifest& m) {
    std::vector<std::string> names =
        m.suite == "all" ? suite_names() : std::vector<std::string>{m.suite};
    std::ostringstream csv;
    csv << "suite,case,residual,tol,pass\n";
    bool all_pass = true;
    for (const std::string& name : names) {
        const SuiteResult r = run_suite(name, m.seed);
        int passed = 0;
        for (const SuiteCase& c : r.cases) {
            csv << r.suite << ',' << c.name << ',' << fmt17(c.residual) << ','
                << fmt17(c.tol) << ',' << (c.pass ? 1 : 0) << '\n';
            passed += c.pass ? 1 : 0;
            if (!c.pass)
                std::cerr << "FAIL " << c.name << " residual=" << fmt17(c.residual)
                          << " tol=" << fmt17(c.tol) << '\n';
        }
        std::cout << (r.all_pass ? "PASS " : "FAIL ") << name << " (" << passed << '/'
                  << r.cases.size() << " cases)\n";
        all_pass = all_pass && r.all_pass;
    }
    if (!m.report_path.empty()) {
        std::ofstream out(m.report_path, std::ios::binary);
        if (!out) throw Error("cannot open for writing: " + m.report_path);
        out << csv.str();
    }
    return all_pass ? kOk : kVerifyFailure;
}

int cmd_hj_eval(const Manifest& m) {
    const Image x = image_read(m.in_path);
    const Ham ham = ham_of_model(m.model);
    AdmmConfig cfg;
    cfg.lambda = m.lambda;
    cfg.max_iter = m.max_iter;
    cfg.primal_tol = cfg.dual_tol = m.tol;
    const HjSample s = hj_sample(x, m.t, ham, m.alpha, cfg, m.fd_step);
    emit_report(m.report_path,
                {{"model", m.model},
                 {"t", fmt17(s.t)},
                 {"fd_step", fmt17(s.fd_step)},
                 {"S", fmt17(s.S)},
                 {"F", fmt17(s.F)},
                 {"dS_dt", fmt17(s.dS_dt)},
                 {"dF_dt", fmt17(s.dF_dt)},
                 {"pde_residual_S", fmt17(s.pde_residual_S)},
                 {"pde_residual_F", fmt17(s.pde_residual_F)},
                 {"pde_residual_F_specialized", fmt17(s.pde_residual_F_specialized)},
                 {"forms_gap", fmt17(s.forms_gap)},
                 {"moreau_residual", fmt17(s.moreau_residual)},
                 {"grad_x_S", joined(s.grad_x_S)},
                 {"grad_x_F", joined(s.grad_x_F)},
                 {"v_bar", joined(s.v_bar_admm)},
                 {"v_from_S", joined(s.v_from_S)},
                 {"v_from_F", joined(s.v_from_F)}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational denoising for Poisson and multiplicative noise, "
                 "with Hamilton-Jacobi verification"};
    app.require_subcommand(1);
    Manifest m;

    CLI::App* noise = app.add_subcommand("noise", "corrupt a clean image");
    noise->add_option("--in", m.in_path, "clean image")->required();
    noise->add_option("--out", m.out_path, "observed image (x/t), float format")->required();
    noise->add_option("--model", m.model, "noise kind is inferred from the model")
        ->required();
    noise->add_option("--t", m.t, "exposure time / observation count");
    noise->add_option("--seed", m.seed, "rng seed");

    CLI::App* den = app.add_subcommand("denoise", "restore an observed image");
    den->add_option("--in", m.in_path, "observed image (sidecar honored if present)")
        ->required();
    den->add_option("--out", m.out_path, "restored image, float format")->required();
    den->add_option("--model", m.model,
                    "poisson-logtv | poisson-tv | mult-invtv | mult-logtv")
        ->required();
    den->add_option("--t", m.t, "t (defaults to the sidecar value)");
    den->add_option("--alpha", m.alpha, "TV weight");
    den->add_option("--lambda", m.lambda, "splitting penalty");
    den->add_option("--tol", m.tol, "primal/dual stopping tolerance");
    den->add_option("--max-iter", m.max_iter, "iteration budget");
    den->add_option("--report", m.report_path, "key=value report path (default stdout)");

    CLI::App* ver = app.add_subcommand("verify", "run a property battery");
    ver->add_option("--suite", m.suite, "moreau | hj | asymptotic | bregman | duality | all");
    ver->add_option("--seed", m.seed, "battery seed (0 = fixed acceptance battery)");
    ver->add_option("--report", m.report_path, "CSV of residuals");

    CLI::App* hj = app.add_subcommand(
        "hj-eval",
        "value-function probe at one point (2*pixels+3 solves: use small images)");
    hj->add_option("--in", m.in_path, "data image x")->required();
    hj->add_option("--model", m.model, "poisson-logtv | mult-invtv")->required();
    hj->add_option("--t", m.t, "time parameter");
    hj->add_option("--alpha", m.alpha, "TV weight");
    hj->add_option("--lambda", m.lambda, "splitting penalty");
    hj->add_option("--tol", m.tol, "solver tolerance for the probes");
    hj->add_option("--max-iter", m.max_iter, "iteration budget");
    hj->add_option("--fd-step", m.fd_step, "finite-difference step");
    hj->add_option("--report", m.report_path, "key=value report path (default stdout)");

    // hj probes need tighter solves than plain denoising
    hj->callback([&m, hj] {
        if (hj->count("--tol") == 0) m.tol = 1e-10;
        if (hj->count("--max-iter") == 0) m.max_iter = 400000;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    m.t_given = den->count("--t") > 0 || noise->count("--t") > 0 || hj->count("--t") > 0;

    try {
        if (noise->parsed()) return cmd_noise(m);
        if (den->parsed()) return cmd_denoise(m);
        if (ver->parsed()) return cmd_verify(m);
        if (hj->parsed()) return cmd_hj_eval(m);
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
