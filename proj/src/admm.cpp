#include "varden/admm.hpp"

#include "varden/tv_ops.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace varden {

double newton_bisect(const ScalarRootProblem& f, double x0, double lo, double hi,
                     double tol, int max_iter) {
    // g strictly increasing with g(lo) <= 0 <= g(hi)
    double x = std::clamp(x0, lo, hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gx = f.g(x, f.ctx);
        if (gx == 0.0) return x;
        (gx > 0.0 ? hi : lo) = x;
        const double dgx = f.dg(x, f.ctx);
        const double step = gx / dgx;
        // test the raw Newton correction before any safeguard: a sub-tolerance
        // step at x means x is the root to within tol, and falling back to the
        // midpoint of a bracket whose far end never tightened would jump away
        if (std::fabs(step) <= tol * (1.0 + std::fabs(x))) return x;
        double xn = x - step;
        if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= tol * (1.0 + std::fabs(xn))) return xn;
        x = xn;
    }
    throw Error("newton_bisect: no convergence within iteration budget");
}

namespace {

void check_cfg(const AdmmConfig& cfg, const char* who) {
    if (!(cfg.t > 0.0) || !(cfg.lambda > 0.0) || !(cfg.alpha > 0.0))
        throw Error(std::string(who) + ": t, lambda, alpha must be positive");
    if (cfg.max_iter <= 0 || cfg.newton_max_iter <= 0)
        throw Error(std::string(who) + ": iteration budgets must be positive");
    if (!(cfg.primal_tol > 0.0) || !(cfg.dual_tol > 0.0) || !(cfg.newton_tol > 0.0))
        throw Error(std::string(who) + ": tolerances must be positive");
}

TvProxConfig inner_tv_cfg(const AdmmConfig& cfg, double weight) {
    TvProxConfig tv;
    tv.alpha = weight;
    tv.dual_tol = std::max(1e-13, 0.01 * std::min(cfg.primal_tol, cfg.dual_tol));
    tv.max_iter = 20000;
    tv.step = 0.25;
    return tv;
}

// KL fidelity sum a log(a/u) - a + u with a = x/t fixed; 0 log 0 = 0
double kl_fidelity(const Image& x, double t, const Image& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x.data[i] / t, u = v.data[i];
        if (a == 0.0)
            s += u;
        else if (u <= 0.0)
            return std::numeric_limits<double>::infinity();
        else
            s += a * std::log(a / u) - a + u;
    }
    return s;
}

// Itakura-Saito fidelity sum -log(a/u) + a/u - 1, a = x/t
double is_fidelity(const Image& x, double t, const Image& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x.data[i] / t, u = v.data[i];
        if (u <= 0.0 || a <= 0.0) return std::numeric_limits<double>::infinity();
        const double r = a / u;
        s += -std::log(r) + r - 1.0;
    }
    return s;
}

struct PoisNewtonCtx {
    double lt;  // lambda * t
    double lr;  // lambda * (x - w - y)
};
double pois_g(double v, const void* c) {
    const auto* p = static_cast<const PoisNewtonCtx*>(c);
    return std::log(v) + p->lt * v - p->lr;
}
double pois_dg(double v, const void* c) {
    const auto* p = static_cast<const PoisNewtonCtx*>(c);
    return 1.0 / v + p->lt;
}

struct MultLogNewtonCtx {
    double t, lambda, x, c;  // g(u) = t + lambda (u - c) - x exp(-u)
};
double mlog_g(double u, const void* c) {
    const auto* p = static_cast<const MultLogNewtonCtx*>(c);
    return p->t + p->lambda * (u - p->c) - p->x * std::exp(-u);
}
double mlog_dg(double u, const void* c) {
    const auto* p = static_cast<const MultLogNewtonCtx*>(c);
    return p->lambda + p->x * std::exp(-u);
}

// per-pixel v-update for the x = w + t v split:
// (H*)'(v) + lambda (t v - r) = 0 with r = x - w - y
double data_prox(Ham ham, double r, double vprev, const AdmmConfig& cfg) {
    switch (ham) {
        case Ham::quadratic:
            return cfg.lambda * r / (1.0 + cfg.lambda * cfg.t);
        case Ham::burg_neglog: {
            const double s = r / (2.0 * cfg.t);
            return s + std::sqrt(s * s + 1.0 / (cfg.lambda * cfg.t));
        }
        case Ham::poisson_exp: {
            PoisNewtonCtx ctx{cfg.lambda * cfg.t, cfg.lambda * r};
            double lo = vprev > 0.0 ? vprev : 1.0, hi = lo;
            while (pois_g(lo, &ctx) > 0.0 && lo > 1e-300) lo *= 0.5;
            while (pois_g(hi, &ctx) < 0.0 && hi < 1e300) hi *= 2.0;
            try {
                return newton_bisect({pois_g, pois_dg, &ctx}, vprev, lo, hi,
                                     cfg.newton_tol, cfg.newton_max_iter);
            } catch (const Error& e) {
                char buf[160];
                std::snprintf(buf, sizeof buf, " (lt=%.17g lr=%.17g vprev=%.17g)",
                              ctx.lt, ctx.lr, vprev);
                throw Error(e.what() + std::string(buf));
            }
        }
    }
    throw Error("data_prox: bad Hamiltonian kind");
}

double residual_scale(std::size_t n) { return std::sqrt(static_cast<double>(n)); }

}  // namespace

SolveReport admm_generic(const Image& x, Ham ham, const AdmmConfig& cfg) {
    check_cfg(cfg, "admm_generic");
    require_finite(x, "admm_generic");
    if (ham == Ham::poisson_exp)
        for (double xi : x.data)
            if (xi < 0.0) throw DomainError("admm_generic: negative pixels infeasible for the Poisson model");
    if (ham == Ham::burg_neglog)
        for (double xi : x.data)
            if (xi <= 0.0) throw DomainError("admm_generic: nonpositive pixels infeasible for the multiplicative model");

    const std::size_t n = x.size();
    const double t = cfg.t;
    constexpr double v_floor = 1e-8;

    SolveReport rep;
    rep.v_bar = Image(x.rows, x.cols);
    Image& v = rep.v_bar;
    Image w(x.rows, x.cols), y(x.rows, x.cols), b(x.rows, x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        v.data[i] = std::max(x.data[i] / t, v_floor);
        w.data[i] = x.data[i] - t * v.data[i];
    }

    const TvProxConfig tv_cfg = inner_tv_cfg(cfg, cfg.alpha);
    std::vector<double> qv, qh;  // warm-started TV duals, private to this solve
    const double rs = residual_scale(n);

    for (int k = 1; k <= cfg.max_iter; ++k) {
        try {
            for (std::size_t i = 0; i < n; ++i)
                v.data[i] = data_prox(ham, x.data[i] - w.data[i] - y.data[i], v.data[i], cfg);
        } catch (const Error& e) {
            rep.iterations = k - 1;
            throw SolverError(std::string("admm_generic: inner solve failed: ") + e.what(), rep);
        }
        // ball projection via the Moreau split: w = b - prox_{alpha TV}(b)
        for (std::size_t i = 0; i < n; ++i)
            b.data[i] = x.data[i] - t * v.data[i] - y.data[i];
        const TvProxResult prox = tv_prox_warm(b, tv_cfg, qv, qh);
        double dual_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wn = b.data[i] - prox.z.data[i];
            const double dw = wn - w.data[i];
            dual_res += dw * dw;
            w.data[i] = wn;
        }
        dual_res = cfg.lambda * std::sqrt(dual_res) / rs;
        double primal_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = w.data[i] + t * v.data[i] - x.data[i];
            y.data[i] += r;
            primal_res += r * r;
        }
        primal_res = std::sqrt(primal_res) / rs;
        rep.primal_residuals.push_back(primal_res);
        rep.dual_residuals.push_back(dual_res);
        rep.iterations = k;
        if (primal_res < cfg.primal_tol && dual_res < cfg.dual_tol) {
            rep.converged = true;
            break;
        }
    }

    // objectives at v_bar; gradient image per Hamiltonian, no interior guard
    Image gv(x.rows, x.cols);
    double fid = 0.0;
    switch (ham) {
        case Ham::quadratic:
            gv.data = v.data;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = x.data[i] / t - v.data[i];
                fid += 0.5 * d * d;
            }
            break;
        case Ham::poisson_exp:
            for (std::size_t i = 0; i < n; ++i) gv.data[i] = std::log(v.data[i]);
            fid = kl_fidelity(x, t, v);
            break;
        case Ham::burg_neglog:
            for (std::size_t i = 0; i < n; ++i) gv.data[i] = -1.0 / v.data[i];
            fid = is_fidelity(x, t, v);
            break;
    }
    rep.obj_nonadditive = t * fid + cfg.alpha * tv_eval(gv);
    rep.obj_additive = t * h_star_eval(ham, v).value;
    return rep;
}

SolveReport poisson_logtv_denoise(const Image& x, const AdmmConfig& cfg) {
    return admm_generic(x, Ham::poisson_exp, cfg);
}

SolveReport mult_invtv_denoise(const Image& x, const AdmmConfig& cfg) {
    return admm_generic(x, Ham::burg_neglog, cfg);
}

SolveReport poisson_tv_denoise(const Image& x, const AdmmConfig& cfg) {
    check_cfg(cfg, "poisson_tv_denoise");
    require_finite(x, "poisson_tv_denoise");
    for (double xi : x.data)
        if (xi < 0.0) throw DomainError("poisson_tv_denoise: negative pixels infeasible");

    const std::size_t n = x.size();
    const double t = cfg.t, lam = cfg.lambda;
    constexpr double v_floor = 1e-8;

    SolveReport rep;
    rep.v_bar = Image(x.rows, x.cols);
    Image& v = rep.v_bar;
    Image w(x.rows, x.cols), y(x.rows, x.cols), b(x.rows, x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        v.data[i] = std::max(x.data[i] / t, v_floor);
        w.data[i] = v.data[i];
    }

    const TvProxConfig tv_cfg = inner_tv_cfg(cfg, cfg.alpha / lam);
    std::vector<double> qv, qh;
    const double rs = residual_scale(n);

    for (int k = 1; k <= cfg.max_iter; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = 0.5 * (w.data[i] - y.data[i] - t / lam);
            v.data[i] = s + std::sqrt(s * s + x.data[i] / lam);
        }
        for (std::size_t i = 0; i < n; ++i) b.data[i] = v.data[i] + y.data[i];
        const TvProxResult prox = tv_prox_warm(b, tv_cfg, qv, qh);
        double dual_res = 0.0, primal_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dw = prox.z.data[i] - w.data[i];
            dual_res += dw * dw;
            w.data[i] = prox.z.data[i];
            const double r = v.data[i] - w.data[i];
            y.data[i] += r;
            primal_res += r * r;
        }
        dual_res = lam * std::sqrt(dual_res) / rs;
        primal_res = std::sqrt(primal_res) / rs;
        rep.primal_residuals.push_back(primal_res);
        rep.dual_residuals.push_back(dual_res);
        rep.iterations = k;
        if (primal_res < cfg.primal_tol && dual_res < cfg.dual_tol) {
            rep.converged = true;
            break;
        }
    }
    rep.obj_nonadditive = t * kl_fidelity(x, t, v) + cfg.alpha * tv_eval(v);
    return rep;
}

SolveReport mult_logtv_denoise(const Image& x, const AdmmConfig& cfg) {
    check_cfg(cfg, "mult_logtv_denoise");
    require_finite(x, "mult_logtv_denoise");
    for (double xi : x.data)
        if (xi <= 0.0) throw DomainError("mult_logtv_denoise: nonpositive pixels infeasible");

    const std::size_t n = x.size();
    const double t = cfg.t, lam = cfg.lambda;
    constexpr double v_floor = 1e-8;

    // log-variable split: u carries the data term, w the TV term, u = w enforced
    SolveReport rep;
    Image u(x.rows, x.cols), w(x.rows, x.cols), y(x.rows, x.cols), b(x.rows, x.cols);
    for (std::size_t i = 0; i < n; ++i) {
        u.data[i] = std::log(std::max(x.data[i] / t, v_floor));
        w.data[i] = u.data[i];
    }

    const TvProxConfig tv_cfg = inner_tv_cfg(cfg, cfg.alpha / lam);
    std::vector<double> qv, qh;
    const double rs = residual_scale(n);

    for (int k = 1; k <= cfg.max_iter; ++k) {
        try {
            for (std::size_t i = 0; i < n; ++i) {
                MultLogNewtonCtx ctx{t, lam, x.data[i], w.data[i] - y.data[i]};
                double lo = u.data[i], hi = u.data[i], stepw = 1.0;
                while (mlog_g(lo, &ctx) > 0.0) { lo -= stepw; stepw *= 2.0; }
                stepw = 1.0;
                while (mlog_g(hi, &ctx) < 0.0) { hi += stepw; stepw *= 2.0; }
                u.data[i] = newton_bisect({mlog_g, mlog_dg, &ctx}, u.data[i], lo, hi,
                                          cfg.newton_tol, cfg.newton_max_iter);
            }
        } catch (const Error& e) {
            rep.iterations = k - 1;
            rep.v_bar = Image(x.rows, x.cols);
            for (std::size_t i = 0; i < n; ++i) rep.v_bar.data[i] = std::exp(w.data[i]);
            throw SolverError(std::string("mult_logtv_denoise: inner solve failed: ") + e.what(), rep);
        }
        for (std::size_t i = 0; i < n; ++i) b.data[i] = u.data[i] + y.data[i];
        const TvProxResult prox = tv_prox_warm(b, tv_cfg, qv, qh);
        double dual_res = 0.0, primal_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dw = prox.z.data[i] - w.data[i];
            dual_res += dw * dw;
            w.data[i] = prox.z.data[i];
            const double r = u.data[i] - w.data[i];
            y.data[i] += r;
            primal_res += r * r;
        }
        dual_res = lam * std::sqrt(dual_res) / rs;
        primal_res = std::sqrt(primal_res) / rs;
        rep.primal_residuals.push_back(primal_res);
        rep.dual_residuals.push_back(dual_res);
        rep.iterations = k;
        if (primal_res < cfg.primal_tol && dual_res < cfg.dual_tol) {
            rep.converged = true;
            break;
        }
    }
    rep.v_bar = Image(x.rows, x.cols);
    for (std::size_t i = 0; i < n; ++i) rep.v_bar.data[i] = std::exp(w.data[i]);
    rep.obj_nonadditive = t * is_fidelity(x, t, rep.v_bar) + cfg.alpha * tv_eval(w);
    return rep;
}

}  // namespace varden
