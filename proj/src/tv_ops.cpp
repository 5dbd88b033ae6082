#include "varden/tv_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace varden {

double tv_eval(const Image& u) {
    require_finite(u, "tv_eval");
    double s = 0.0;
    for (int i = 0; i + 1 < u.rows; ++i)
        for (int j = 0; j < u.cols; ++j)
            s += std::fabs(u.at(i + 1, j) - u.at(i, j));
    for (int i = 0; i < u.rows; ++i)
        for (int j = 0; j + 1 < u.cols; ++j)
            s += std::fabs(u.at(i, j + 1) - u.at(i, j));
    return s;
}

namespace {

void check_cfg(const TvProxConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw Error("tv_prox: alpha must be positive");
    if (cfg.max_iter <= 0) throw Error("tv_prox: max_iter must be positive");
    if (!(cfg.dual_tol > 0.0)) throw Error("tv_prox: dual_tol must be positive");
    if (!(cfg.step > 0.0 && cfg.step <= 0.25)) throw Error("tv_prox: step must lie in (0, 0.25]");
}

// z = b - div q for edge duals (qv on vertical edges, qh on horizontal)
void primal_from_dual(const Image& b, const std::vector<double>& qv,
                      const std::vector<double>& qh, Image& z) {
    z.data = b.data;
    const int rows = b.rows, cols = b.cols;
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double q = qv[static_cast<std::size_t>(i) * cols + j];
            z.at(i, j) += q;       // edge value is z(i+1,j)-z(i,j)
            z.at(i + 1, j) -= q;
        }
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j + 1 < cols; ++j) {
            const double q = qh[static_cast<std::size_t>(i) * (cols - 1) + j];
            z.at(i, j) += q;
            z.at(i, j + 1) -= q;
        }
}

// duality gap alpha*TV(z) - <q, Dz>; each edge term is >= 0 once |q| <= alpha
double duality_gap(const Image& z, const std::vector<double>& qv,
                   const std::vector<double>& qh, double alpha) {
    double gap = 0.0;
    const int rows = z.rows, cols = z.cols;
    for (int i = 0; i + 1 < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double d = z.at(i + 1, j) - z.at(i, j);
            gap += alpha * std::fabs(d) - qv[static_cast<std::size_t>(i) * cols + j] * d;
        }
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j + 1 < cols; ++j) {
            const double d = z.at(i, j + 1) - z.at(i, j);
            gap += alpha * std::fabs(d) - qh[static_cast<std::size_t>(i) * (cols - 1) + j] * d;
        }
    return gap;
}

}  // namespace

TvProxResult tv_prox_warm(const Image& b, const TvProxConfig& cfg,
                          std::vector<double>& qv, std::vector<double>& qh) {
    check_cfg(cfg);
    require_finite(b, "tv_prox");
    const int rows = b.rows, cols = b.cols;
    const std::size_t nv = static_cast<std::size_t>(rows > 0 ? rows - 1 : 0) * cols;
    const std::size_t nh = static_cast<std::size_t>(rows) * (cols > 0 ? cols - 1 : 0);
    if (qv.size() != nv) qv.assign(nv, 0.0);
    if (qh.size() != nh) qh.assign(nh, 0.0);
    // clamp carried-over duals in case alpha shrank between calls
    for (double& q : qv) q = std::clamp(q, -cfg.alpha, cfg.alpha);
    for (double& q : qh) q = std::clamp(q, -cfg.alpha, cfg.alpha);

    TvProxResult res;
    res.z = Image(rows, cols);
    const double tol = cfg.dual_tol * (1.0 + norm_inf(b));
    // momentum needs step <= 1/||div D||: 1/8 on a 2D grid, 1/4 for a line
    const double safe = (rows > 1 && cols > 1) ? 0.125 : 0.25;
    const double tau = std::min(cfg.step, safe);

    if (nv + nh == 0) {  // single pixel: prox is the identity
        res.z.data = b.data;
        res.converged = true;
        return res;
    }

    // Nesterov-accelerated dual ascent: gradient step at the extrapolated
    // point y, project into the box, extrapolate from successive projected
    // iterates. Momentum resets when it turns against the gradient step
    // (restart test of O'Donoghue-Candes), and on every call: warm duals
    // carry over, momentum does not.
    std::vector<double> yv = qv, yh = qh, pv = qv, ph = qh;
    double tk = 1.0;
    for (int k = 1; k <= cfg.max_iter; ++k) {
        primal_from_dual(b, yv, yh, res.z);
        double fp = 0.0, align = 0.0;
        for (int i = 0; i + 1 < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                const std::size_t e = static_cast<std::size_t>(i) * cols + j;
                const double d = res.z.at(i + 1, j) - res.z.at(i, j);
                const double qn = std::clamp(yv[e] + tau * d, -cfg.alpha, cfg.alpha);
                fp = std::max(fp, std::fabs(qn - qv[e]));
                align += (yv[e] - qn) * (qn - qv[e]);
                pv[e] = qv[e];
                qv[e] = qn;
            }
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j + 1 < cols; ++j) {
                const std::size_t e = static_cast<std::size_t>(i) * (cols - 1) + j;
                const double d = res.z.at(i, j + 1) - res.z.at(i, j);
                const double qn = std::clamp(yh[e] + tau * d, -cfg.alpha, cfg.alpha);
                fp = std::max(fp, std::fabs(qn - qh[e]));
                align += (yh[e] - qn) * (qn - qh[e]);
                ph[e] = qh[e];
                qh[e] = qn;
            }
        res.iterations = k;
        res.fp_residual = fp / tau;
        if (res.fp_residual <= tol) {
            primal_from_dual(b, qv, qh, res.z);
            res.gap = duality_gap(res.z, qv, qh, cfg.alpha);
            if (res.gap <= tol) {
                res.converged = true;
                return res;
            }
        }
        if (align > 0.0) {  // momentum points uphill: restart
            tk = 1.0;
            yv = qv;
            yh = qh;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            const double beta = (tk - 1.0) / tn;
            for (std::size_t e = 0; e < nv; ++e) yv[e] = qv[e] + beta * (qv[e] - pv[e]);
            for (std::size_t e = 0; e < nh; ++e) yh[e] = qh[e] + beta * (qh[e] - ph[e]);
            tk = tn;
        }
    }
    primal_from_dual(b, qv, qh, res.z);
    res.gap = duality_gap(res.z, qv, qh, cfg.alpha);
    res.converged = false;  // best iterate handed back with achieved residuals
    return res;
}

TvProxResult tv_prox(const Image& b, const TvProxConfig& cfg) {
    std::vector<double> qv, qh;
    return tv_prox_warm(b, cfg, qv, qh);
}

/*
 * Taut string: with running sums r_k = b_1 + ... + b_k, the 1D prox is the
 * derivative of the shortest path from (0,0) to (m, r_m) through the tube
 * |s(k) - r_k| <= alpha at interior k. Greedy construction: extend a straight
 * segment from the current anchor while some slope is feasible
 * (max lower-slope <= min upper-slope); on violation the string bends at the
 * binding tube wall and the scan restarts from that touch point. Quadratic
 * worst case, exact — oracle use only.
 */
Image tv_prox_1d_exact(const Image& b, double alpha) {
    if (b.rows != 1) throw DimensionError("tv_prox_1d_exact: expects a single-row image");
    require_finite(b, "tv_prox_1d_exact");
    if (alpha < 0.0) throw Error("tv_prox_1d_exact: alpha must be nonnegative");
    const int m = b.cols;
    Image z(1, m);
    if (m == 1 || alpha == 0.0) {
        z.data = b.data;
        return z;
    }
    std::vector<double> r(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 1; k <= m; ++k) r[k] = r[k - 1] + b.data[k - 1];

    int ka = 0;
    double ya = 0.0;
    while (ka < m) {
        double min_su = std::numeric_limits<double>::infinity();
        double max_sl = -std::numeric_limits<double>::infinity();
        int ju = ka, jl = ka;
        bool bent = false;
        for (int k = ka + 1; k <= m; ++k) {
            const double uk = (k == m) ? r[m] : r[k] + alpha;
            const double lk = (k == m) ? r[m] : r[k] - alpha;
            const double su = (uk - ya) / (k - ka);
            const double sl = (lk - ya) / (k - ka);
            if (sl > min_su) {  // lower wall rises above the upper-touch line
                for (int i = ka + 1; i <= ju; ++i) z.data[i - 1] = min_su;
                ya += min_su * (ju - ka);
                ka = ju;
                bent = true;
                break;
            }
            if (su < max_sl) {  // upper wall drops below the lower-touch line
                for (int i = ka + 1; i <= jl; ++i) z.data[i - 1] = max_sl;
                ya += max_sl * (jl - ka);
                ka = jl;
                bent = true;
                break;
            }
            if (su < min_su) { min_su = su; ju = k; }
            if (sl > max_sl) { max_sl = sl; jl = k; }
        }
        if (!bent) {  // straight run to the endpoint is feasible
            const double s = (r[m] - ya) / (m - ka);
            for (int i = ka + 1; i <= m; ++i) z.data[i - 1] = s;
            break;
        }
    }
    return z;
}

}  // namespace varden
