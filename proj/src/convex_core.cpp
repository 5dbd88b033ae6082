#include "varden/convex_core.hpp"

#include <cmath>

namespace varden {

namespace {

// y log y with the continuous extension 0 log 0 = 0; negative y is a domain issue
// handled by the callers
double xlogx(double y) {
    return y == 0.0 ? 0.0 : y * std::log(y);
}

}  // namespace

ExtReal h_eval(Ham ham, const Image& p) {
    require_finite(p, "h_eval");
    double s = 0.0;
    switch (ham) {
        case Ham::quadratic:
            for (double v : p.data) s += 0.5 * v * v;
            return ExtReal::of(s);
        case Ham::poisson_exp:
            for (double v : p.data) s += std::exp(v);
            return ExtReal::of(s);
        case Ham::burg_neglog:
            for (double v : p.data) {
                if (v >= 0.0) return ExtReal::pos_inf();
                s += -1.0 - std::log(-v);
            }
            return ExtReal::of(s);
    }
    throw Error("h_eval: bad Hamiltonian kind");
}

ExtReal h_star_eval(Ham ham, const Image& y) {
    require_finite(y, "h_star_eval");
    double s = 0.0;
    switch (ham) {
        case Ham::quadratic:
            for (double v : y.data) s += 0.5 * v * v;
            return ExtReal::of(s);
        case Ham::poisson_exp:
            for (double v : y.data) {
                if (v < 0.0) return ExtReal::pos_inf();
                s += xlogx(v) - v;
            }
            return ExtReal::of(s);
        case Ham::burg_neglog:
            for (double v : y.data) {
                if (v <= 0.0) return ExtReal::pos_inf();
                s += -std::log(v);
            }
            return ExtReal::of(s);
    }
    throw Error("h_star_eval: bad Hamiltonian kind");
}

bool in_int_dom_h(Ham ham, const Image& p) {
    if (ham == Ham::burg_neglog) {
        for (double v : p.data)
            if (!(v <= -eps_dom)) return false;
    }
    return true;
}

bool in_dom_h_star(Ham ham, const Image& y) {
    switch (ham) {
        case Ham::quadratic: return true;
        case Ham::poisson_exp:
            for (double v : y.data)
                if (v < 0.0) return false;
            return true;
        case Ham::burg_neglog:
            for (double v : y.data)
                if (v <= 0.0) return false;
            return true;
    }
    return false;
}

bool in_int_dom_h_star(Ham ham, const Image& y) {
    if (ham == Ham::quadratic) return true;
    for (double v : y.data)
        if (!(v >= eps_dom)) return false;
    return true;
}

Image grad_h(Ham ham, const Image& p) {
    require_finite(p, "grad_h");
    if (!in_int_dom_h(ham, p))
        throw DomainError("grad_h: argument not in the interior of dom H");
    Image g(p.rows, p.cols);
    switch (ham) {
        case Ham::quadratic:
            g.data = p.data;
            break;
        case Ham::poisson_exp:
            for (std::size_t i = 0; i < p.size(); ++i) g.data[i] = std::exp(p.data[i]);
            break;
        case Ham::burg_neglog:
            for (std::size_t i = 0; i < p.size(); ++i) g.data[i] = -1.0 / p.data[i];
            break;
    }
    return g;
}

Image grad_h_star(Ham ham, const Image& y) {
    require_finite(y, "grad_h_star");
    if (!in_int_dom_h_star(ham, y))
        throw DomainError("grad_h_star: argument not in the interior of dom H*");
    Image g(y.rows, y.cols);
    switch (ham) {
        case Ham::quadratic:
            g.data = y.data;
            break;
        case Ham::poisson_exp:
            for (std::size_t i = 0; i < y.size(); ++i) g.data[i] = std::log(y.data[i]);
            break;
        case Ham::burg_neglog:
            for (std::size_t i = 0; i < y.size(); ++i) g.data[i] = -1.0 / y.data[i];
            break;
    }
    return g;
}

double bregman_primal(Ham ham, const Image& a, const Image& u) {
    require_same_shape(a, u, "bregman_primal");
    require_finite(a, "bregman_primal");
    if (!in_dom_h_star(ham, a))
        throw DomainError("bregman_primal: first argument outside dom H*");
    if (!in_int_dom_h_star(ham, u))
        throw DomainError("bregman_primal: second argument not interior to dom H*");
    // closed forms per Hamiltonian (numerically kinder than the generic
    // H*(a) - H*(u) - <grad H*(u), a-u>, which the tests cross-check)
    double s = 0.0;
    switch (ham) {
        case Ham::quadratic:
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a.data[i] - u.data[i];
                s += 0.5 * d * d;
            }
            break;
        case Ham::poisson_exp:
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double ai = a.data[i], ui = u.data[i];
                s += xlogx(ai) - ai + ui - ai * std::log(ui);
            }
            break;
        case Ham::burg_neglog:
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double r = a.data[i] / u.data[i];
                s += -std::log(r) + r - 1.0;
            }
            break;
    }
    return s;
}

double bregman_primal_dual(Ham ham, const Image& a, const Image& p) {
    require_same_shape(a, p, "bregman_primal_dual");
    const ExtReal hs = h_star_eval(ham, a);
    const ExtReal h = h_eval(ham, p);
    if (!hs.finite)
        throw DomainError("bregman_primal_dual: first argument outside dom H*");
    if (!h.finite)
        throw DomainError("bregman_primal_dual: second argument outside dom H");
    return hs.value + h.value - dot(p, a);
}

double bregman_scaling_check(Ham ham, double t, const Image& x, const Image& u) {
    if (!(t > 0.0)) throw DomainError("bregman_scaling_check: t must be positive");
    require_same_shape(x, u, "bregman_scaling_check");
    Image xt(x.rows, x.cols), ut(u.rows, u.cols);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xt.data[i] = x.data[i] / t;
        ut.data[i] = u.data[i] / t;
    }
    const double lhs = t * bregman_primal(ham, xt, ut);
    // rhs: Bregman distance of g = (tH)*, g(w) = t H*(w/t), grad g(u) = grad H*(u/t)
    const ExtReal gx = h_star_eval(ham, xt);
    const ExtReal gu = h_star_eval(ham, ut);
    if (!gx.finite || !gu.finite)
        throw DomainError("bregman_scaling_check: argument outside dom (tH)*");
    const Image gg = grad_h_star(ham, ut);
    double inner = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) inner += gg.data[i] * (x.data[i] - u.data[i]);
    const double rhs = t * gx.value - t * gu.value - inner;
    return std::fabs(lhs - rhs);
}

}  // namespace varden
