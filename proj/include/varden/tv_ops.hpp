#pragma once

#include "varden/image.hpp"

#include <vector>

namespace varden {

struct TvProxConfig {
    double alpha = 1.0;     // regularization weight
    int max_iter = 20000;
    double dual_tol = 1e-8;
    double step = 0.25;     // dual gradient step; must stay in (0, 0.25]
};

// anisotropic TV: sum of |vertical neighbor differences| + |horizontal neighbor
// differences|, no wraparound
double tv_eval(const Image& u);

struct TvProxResult {
    Image z;
    int iterations = 0;
    double gap = 0.0;          // duality gap at the returned iterate
    double fp_residual = 0.0;  // dual fixed-point residual max|q+ - q|/step
    bool converged = false;
};

// argmin_z alpha*TV(z) + 1/2 ||z - b||^2 by accelerated projected gradient on
// the edge duals (each clipped to [-alpha, alpha]); z = b - div q throughout,
// so the output mean equals mean(b) up to rounding. Non-convergence is
// reported via the result, never silently.
TvProxResult tv_prox(const Image& b, const TvProxConfig& cfg);

// same, warm-started from caller-held dual state (sized (rows-1)*cols and
// rows*(cols-1); resized/zeroed if they do not match)
TvProxResult tv_prox_warm(const Image& b, const TvProxConfig& cfg,
                          std::vector<double>& qv, std::vector<double>& qh);

// exact 1D prox via the taut-string construction: running sums of b form a
// tube of half-width alpha; the taut string through it differentiates to the
// minimizer. Oracle for tv_prox.
Image tv_prox_1d_exact(const Image& b, double alpha);

}  // namespace varden
