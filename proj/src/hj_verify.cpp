#include "varden/hj_verify.hpp"

#include <cmath>

namespace varden {

namespace {

AdmmConfig with_params(const AdmmConfig& cfg, double t, double alpha) {
    AdmmConfig c = cfg;
    c.t = t;
    c.alpha = alpha;
    return c;
}

SolveReport solve_converged(const Image& x, double t, Ham ham, double alpha,
                            const AdmmConfig& cfg, const char* who) {
    SolveReport rep = admm_generic(x, ham, with_params(cfg, t, alpha));
    if (!rep.converged)
        throw SolverError(std::string(who) + ": solver did not converge", rep);
    return rep;
}

double t_h_star(Ham ham, const Image& x, double t) {
    Image a(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) a.data[i] = x.data[i] / t;
    const ExtReal hs = h_star_eval(ham, a);
    if (!hs.finite) throw DomainError("t_h_star: x/t outside dom H*");
    return t * hs.value;
}

void check_probe_feasible(const Image& x, double t, Ham ham, double fd_step,
                          const char* who) {
    if (!(t > fd_step))
        throw DomainError(std::string(who) + ": need t > fd_step for the t-probe");
    if (ham == Ham::quadratic) return;
    // x-probes move each pixel by fd_step; stay strictly feasible
    for (double xi : x.data)
        if (!(xi > fd_step))
            throw DomainError(std::string(who) + ": x-probe would leave the feasible set");
}

double finite_h(Ham ham, const Image& p, const char* who) {
    const ExtReal h = h_eval(ham, p);
    if (!h.finite) throw DomainError(std::string(who) + ": FD gradient left dom H");
    return h.value;
}

}  // namespace

double eval_S(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg) {
    const SolveReport rep = solve_converged(x, t, ham, alpha, cfg, "eval_S");
    return *rep.obj_additive;
}

FPair eval_F_pair(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg) {
    Image a(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) a.data[i] = x.data[i] / t;
    if (!in_int_dom_h_star(ham, a))
        throw DomainError("eval_F: x/t not in the interior of dom H*");
    const double ths = t_h_star(ham, x, t);
    const SolveReport rep = solve_converged(x, t, ham, alpha, cfg, "eval_F");
    return {rep.obj_nonadditive, ths - *rep.obj_additive};
}

double eval_F(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg) {
    const FPair f = eval_F_pair(x, t, ham, alpha, cfg);
    const double scale = 1.0 + std::fabs(t_h_star(ham, x, t));
    const double tol = 1e3 * (cfg.primal_tol + cfg.dual_tol) * scale;
    if (std::fabs(f.direct - f.identity) > tol)
        throw Error("eval_F: direct and identity routes disagree: " +
                    std::to_string(f.direct) + " vs " + std::to_string(f.identity));
    return f.identity;
}

Image fd_grad_x(const ValueFn& f, const Image& x, double t, double h) {
    Image g(x.rows, x.cols);
    Image xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp.data[i] = x.data[i] + h;
        xm.data[i] = x.data[i] - h;
        g.data[i] = (f(xp, t) - f(xm, t)) / (2.0 * h);
        xp.data[i] = x.data[i];
        xm.data[i] = x.data[i];
    }
    return g;
}

double fd_dt(const ValueFn& f, const Image& x, double t, double h) {
    return (f(x, t + h) - f(x, t - h)) / (2.0 * h);
}

Image recover_minimizer_from_S(const Image& x, double t, Ham ham, double alpha,
                               const AdmmConfig& cfg, double fd_step) {
    check_probe_feasible(x, t, ham, fd_step, "recover_minimizer_from_S");
    const ValueFn s_fn = [&](const Image& xx, double tt) {
        return eval_S(xx, tt, ham, alpha, cfg);
    };
    return grad_h(ham, fd_grad_x(s_fn, x, t, fd_step));
}

double pde_residual_S(const Image& x, double t, Ham ham, double alpha,
                      const AdmmConfig& cfg, double fd_step) {
    check_probe_feasible(x, t, ham, fd_step, "pde_residual_S");
    const ValueFn s_fn = [&](const Image& xx, double tt) {
        return eval_S(xx, tt, ham, alpha, cfg);
    };
    const Image gS = fd_grad_x(s_fn, x, t, fd_step);
    const double dS = fd_dt(s_fn, x, t, fd_step);
    return std::fabs(dS + finite_h(ham, gS, "pde_residual_S"));
}

namespace {

// model-specific displayed form of the F-PDE left-hand side; for the
// quadratic Hamiltonian the general form is already the displayed one
double specialized_lhs(Ham ham, const Image& x, double t, double dF, const Image& gF) {
    switch (ham) {
        case Ham::poisson_exp: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                s += x.data[i] * std::expm1(-gF.data[i]);
            return dF - s / t;
        }
        case Ham::burg_neglog: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double arg = 1.0 + (x.data[i] / t) * gF.data[i];
                if (!(arg > 0.0))
                    throw DomainError("pde_residual_F: specialized form outside its domain");
                s += std::log(arg);
            }
            return dF + s;
        }
        case Ham::quadratic: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double a = x.data[i] / t;
                s += a * gF.data[i] - 0.5 * gF.data[i] * gF.data[i];
            }
            return dF + s;
        }
    }
    throw Error("specialized_lhs: bad Hamiltonian kind");
}

}  // namespace

PdeFResult pde_residual_F_detail(const Image& x, double t, Ham ham, double alpha,
                                 const AdmmConfig& cfg, double fd_step) {
    const HjSample s = hj_sample(x, t, ham, alpha, cfg, fd_step);
    PdeFResult r;
    r.general = s.pde_residual_F;
    r.specialized = s.pde_residual_F_specialized;
    r.forms_gap = s.forms_gap;
    r.recovery_gap_inf = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        r.recovery_gap_inf = std::max(
            r.recovery_gap_inf, std::fabs(s.v_from_F.data[i] - s.v_bar_admm.data[i]));
    return r;
}

double pde_residual_F(const Image& x, double t, Ham ham, double alpha,
                      const AdmmConfig& cfg, double fd_step) {
    return pde_residual_F_detail(x, t, ham, alpha, cfg, fd_step).general;
}

double moreau_identity_check(const Image& x, double t, Ham ham, double alpha,
                             const AdmmConfig& cfg) {
    const SolveReport rep = solve_converged(x, t, ham, alpha, cfg, "moreau_identity_check");
    return std::fabs(*rep.obj_additive + rep.obj_nonadditive - t_h_star(ham, x, t));
}

std::vector<double> asymptotic_check(const Image& v0, const Image& d,
                                     const std::vector<double>& t_schedule, Ham ham,
                                     double alpha, const AdmmConfig& cfg) {
    require_same_shape(v0, d, "asymptotic_check");
    if (!in_int_dom_h_star(ham, v0))
        throw DomainError("asymptotic_check: v0 not in the interior of dom H*");
    std::vector<double> errs;
    errs.reserve(t_schedule.size());
    Image x(v0.rows, v0.cols);
    for (double tk : t_schedule) {
        if (!(tk > 0.0)) throw DomainError("asymptotic_check: t values must be positive");
        for (std::size_t i = 0; i < x.size(); ++i)
            x.data[i] = tk * v0.data[i] + d.data[i];
        const SolveReport rep = solve_converged(x, tk, ham, alpha, cfg, "asymptotic_check");
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double dv = rep.v_bar.data[i] - v0.data[i];
            e += dv * dv;
        }
        errs.push_back(std::sqrt(e));
    }
    return errs;
}

HjSample hj_sample(const Image& x, double t, Ham ham, double alpha,
                   const AdmmConfig& cfg, double fd_step) {
    if (!(fd_step > 0.0)) throw DomainError("hj_sample: fd_step must be positive");
    check_probe_feasible(x, t, ham, fd_step, "hj_sample");
    Image a(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i) a.data[i] = x.data[i] / t;
    if (!in_int_dom_h_star(ham, a))
        throw DomainError("hj_sample: x/t not in the interior of dom H*");

    HjSample s;
    s.x = x;
    s.t = t;
    s.fd_step = fd_step;
    const double h = fd_step;

    // center solve: S, the admm minimizer, and the Moreau residual
    const SolveReport center = solve_converged(x, t, ham, alpha, cfg, "hj_sample");
    const double ths_c = t_h_star(ham, x, t);
    s.S = *center.obj_additive;
    s.F = ths_c - s.S;
    s.v_bar_admm = center.v_bar;
    s.moreau_residual = std::fabs(s.S + center.obj_nonadditive - ths_c);

    // coordinate probes: two solves per pixel shared by the S- and F-sides
    s.grad_x_S = Image(x.rows, x.cols);
    s.grad_x_F = Image(x.rows, x.cols);
    Image xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp.data[i] = x.data[i] + h;
        const double sp = eval_S(xp, t, ham, alpha, cfg);
        const double fp = t_h_star(ham, xp, t) - sp;
        xp.data[i] = x.data[i] - h;
        const double sm = eval_S(xp, t, ham, alpha, cfg);
        const double fm = t_h_star(ham, xp, t) - sm;
        xp.data[i] = x.data[i];
        s.grad_x_S.data[i] = (sp - sm) / (2.0 * h);
        s.grad_x_F.data[i] = (fp - fm) / (2.0 * h);
    }

    // time probes
    const double stp = eval_S(x, t + h, ham, alpha, cfg);
    const double stm = eval_S(x, t - h, ham, alpha, cfg);
    s.dS_dt = (stp - stm) / (2.0 * h);
    const double ftp = t_h_star(ham, x, t + h) - stp;
    const double ftm = t_h_star(ham, x, t - h) - stm;
    s.dF_dt = (ftp - ftm) / (2.0 * h);

    s.pde_residual_S = std::fabs(s.dS_dt + finite_h(ham, s.grad_x_S, "hj_sample"));

    const Image astar = grad_h_star(ham, a);
    Image shifted(x.rows, x.cols);
    for (std::size_t i = 0; i < x.size(); ++i)
        shifted.data[i] = astar.data[i] - s.grad_x_F.data[i];
    const double lhs_general =
        s.dF_dt + finite_h(ham, astar, "hj_sample") - finite_h(ham, shifted, "hj_sample");
    const double lhs_special = specialized_lhs(ham, x, t, s.dF_dt, s.grad_x_F);
    s.pde_residual_F = std::fabs(lhs_general);
    s.pde_residual_F_specialized = std::fabs(lhs_special);
    s.forms_gap = std::fabs(lhs_general - lhs_special);

    s.v_from_S = grad_h(ham, s.grad_x_S);
    s.v_from_F = grad_h(ham, shifted);
    return s;
}

double quadratic_j_S(double x, double t) { return x * x / (2.0 * (1.0 + t)); }

double quadratic_j_F(double x, double t) { return x * x / (2.0 * t * (1.0 + t)); }

double quadratic_j_minimizer(double x, double t) { return x / (1.0 + t); }

}  // namespace varden
