#pragma once

#include "varden/admm.hpp"

#include <functional>
#include <vector>

namespace varden {

// Value-function probes. S(x,t) is the optimal value of the additive
// (convex) model, F(x,t) the optimal value of the non-additive one; they
// satisfy S + F = t H*(x/t) and a pair of Hamilton-Jacobi PDEs in (x,t).
// All derivatives here are central finite differences over solver calls,
// so every tolerance is FD truncation + solver noise.

using ValueFn = std::function<double(const Image& x, double t)>;

// optimal value of the additive model, J realized through the TV ball.
// Throws SolverError (with report) if the solve does not converge.
double eval_S(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg);

struct FPair {
    double direct;    // non-additive objective evaluated at the recovered minimizer
    double identity;  // t H*(x/t) - S, via the same solve
};

// both routes to F from a single solve; eval_F asserts they agree and
// returns the identity route (the smoother one for FD probing).
FPair eval_F_pair(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg);
double eval_F(const Image& x, double t, Ham ham, double alpha, const AdmmConfig& cfg);

// central differences of an arbitrary value function
Image fd_grad_x(const ValueFn& f, const Image& x, double t, double h);
double fd_dt(const ValueFn& f, const Image& x, double t, double h);

// v_bar = grad H (grad_x S), with grad_x S estimated by central differences
Image recover_minimizer_from_S(const Image& x, double t, Ham ham, double alpha,
                               const AdmmConfig& cfg, double fd_step);

// |dS/dt + H(grad_x S)| with FD derivatives
double pde_residual_S(const Image& x, double t, Ham ham, double alpha,
                      const AdmmConfig& cfg, double fd_step);

struct PdeFResult {
    double general;           // |dF/dt + H(a) - H(a - grad_x F)|, a = grad H*(x/t)
    double specialized;       // model-specific displayed form of the same PDE
    double forms_gap;         // |general lhs - specialized lhs|, identical FD inputs
    double recovery_gap_inf;  // ||grad H(a - grad_x F) - admm v_bar||_inf
};

PdeFResult pde_residual_F_detail(const Image& x, double t, Ham ham, double alpha,
                                 const AdmmConfig& cfg, double fd_step);
double pde_residual_F(const Image& x, double t, Ham ham, double alpha,
                      const AdmmConfig& cfg, double fd_step);

// |S + F - t H*(x/t)| with S, F taken from one converged solve
double moreau_identity_check(const Image& x, double t, Ham ham, double alpha,
                             const AdmmConfig& cfg);

// solve at x = t_k v0 + d for each t_k and record ||v_bar - v0||_2
std::vector<double> asymptotic_check(const Image& v0, const Image& d,
                                     const std::vector<double>& t_schedule, Ham ham,
                                     double alpha, const AdmmConfig& cfg);

// one full probe at (x,t): value functions, FD gradients, PDE residuals,
// recoveries. Shares solver calls between the S- and F-sides: F values come
// from the identity t H*(x/t) - S, so both recoveries rest on the same
// 2n+3 solves.
struct HjSample {
    Image x;
    double t = 0.0;
    double S = 0.0;
    Image grad_x_S;
    double dS_dt = 0.0;
    double F = 0.0;
    Image grad_x_F;
    double dF_dt = 0.0;
    double pde_residual_S = 0.0;
    double pde_residual_F = 0.0;
    double pde_residual_F_specialized = 0.0;
    double forms_gap = 0.0;
    double moreau_residual = 0.0;
    Image v_bar_admm;  // minimizer from the center solve
    Image v_from_S;    // grad H (grad_x S)
    Image v_from_F;    // grad H (grad H*(x/t) - grad_x F)
    double fd_step = 0.0;
};

HjSample hj_sample(const Image& x, double t, Ham ham, double alpha,
                   const AdmmConfig& cfg, double fd_step);

// Analytic test configuration (this module only): H = p^2/2 with the
// quadratic penalty J = w^2/2 in one variable. Closed forms let the FD
// machinery be checked against exact values.
double quadratic_j_S(double x, double t);          // x^2 / (2 (1+t))
double quadratic_j_F(double x, double t);          // x^2 / (2 t (1+t))
double quadratic_j_minimizer(double x, double t);  // x / (1+t)

}  // namespace varden
