#pragma once

#include "varden/image.hpp"

namespace varden {

// The three Legendre pairs (H, H*) the solvers are built on:
//   quadratic    H(p) = 1/2 ||p||^2            on R^n,       H*(y) = 1/2 ||y||^2     on R^n
//   poisson_exp  H(p) = sum exp(p_i)           on R^n,       H*(y) = sum (y_i log y_i - y_i)  on [0,inf)^n
//   burg_neglog  H(p) = sum (-1 - log(-p_i))   on (-inf,0)^n, H*(y) = -sum log y_i    on (0,inf)^n
enum class Ham { quadratic, poisson_exp, burg_neglog };

// interior tolerance: a coordinate counts as interior only if at least this far
// inside the open constraint
inline constexpr double eps_dom = 1e-12;

// extended-real value; never encodes +inf as a sentinel double
struct ExtReal {
    double value = 0.0;
    bool finite = true;

    static ExtReal of(double v) { return {v, true}; }
    static ExtReal pos_inf() { return {0.0, false}; }
};

ExtReal h_eval(Ham ham, const Image& p);
ExtReal h_star_eval(Ham ham, const Image& y);

// gradients require strict interior arguments (throw DomainError otherwise);
//   poisson_exp: grad H = exp, grad H* = log
//   burg_neglog: grad H(p) = -1/p, grad H*(y) = -1/y
//   quadratic:   identity both ways
Image grad_h(Ham ham, const Image& p);
Image grad_h_star(Ham ham, const Image& y);

// D_{H*}(a,u) = H*(a) - H*(u) - <grad H*(u), a-u>.
// poisson_exp: Kullback-Leibler, sum(a log a - a + u - a log u), 0 log 0 := 0.
// burg_neglog: Itakura-Saito, sum(-log(a/u) + a/u - 1).
double bregman_primal(Ham ham, const Image& a, const Image& u);

// primal-dual form d_{H*}(a,p) = H*(a) + H(p) - <p,a>; equals D_{H*}(a,u) at p = grad H*(u)
double bregman_primal_dual(Ham ham, const Image& a, const Image& p);

// |t*D_{H*}(x/t, u/t) - D_{(tH)*}(x,u)| with (tH)*(w) = t*H*(w/t); both sides
// evaluated independently
double bregman_scaling_check(Ham ham, double t, const Image& x, const Image& u);

// membership helpers (closure of dom H* resp. strict interior, eps_dom margin)
bool in_dom_h_star(Ham ham, const Image& y);
bool in_int_dom_h_star(Ham ham, const Image& y);
bool in_int_dom_h(Ham ham, const Image& p);

}  // namespace varden
