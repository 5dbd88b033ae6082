#include "doctest.h"
#include "oracles.hpp"
#include "varden/tv_ops.hpp"

#include <cmath>
#include <vector>

using namespace varden;

namespace {

Image random_image(oracles::Rng& rng, int r, int c, double lo, double hi) {
    Image im(r, c, 0.0);
    for (double& v : im.data) v = rng.uniform(lo, hi);
    return im;
}

std::vector<double> row_of(const Image& im) { return im.data; }

}  // namespace

TEST_SUITE("tv_ops") {

TEST_CASE("tv_eval hand values and loop oracle") {
    CHECK(tv_eval(Image(3, 3, 7.0)) == 0.0);
    CHECK(tv_eval(Image(2, 2, {0.0, 1.0, 0.0, 1.0})) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(tv_eval(Image(1, 1, {42.0})) == 0.0);

    oracles::Rng rng(0xA1);
    for (int rep = 0; rep < 20; ++rep) {
        const Image u = random_image(rng, 4, 4, -2.0, 2.0);
        double ref = 0.0;
        for (int i = 0; i + 1 < 4; ++i)
            for (int j = 0; j < 4; ++j) ref += std::fabs(u.at(i + 1, j) - u.at(i, j));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j + 1 < 4; ++j) ref += std::fabs(u.at(i, j + 1) - u.at(i, j));
        CHECK(tv_eval(u) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("tv_eval is 1-homogeneous") {
    oracles::Rng rng(0xA2);
    for (int rep = 0; rep < 20; ++rep) {
        const Image u = random_image(rng, 3, 5, -1.0, 3.0);
        const double c = rng.uniform(0.0, 4.0);
        Image cu = u;
        for (double& v : cu.data) v *= c;
        CHECK(std::fabs(tv_eval(cu) - c * tv_eval(u)) <=
              1e-12 * (1.0 + c * tv_eval(u)));
    }
}

TEST_CASE("tv_prox on constants and the two-pixel closed form") {
    TvProxConfig cfg;
    cfg.alpha = 0.7;
    const Image b(3, 3, 2.5);
    const TvProxResult r = tv_prox(b, cfg);
    CHECK(r.converged);
    for (double v : r.z.data) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

    // gap > 2 alpha: both ends move in by alpha
    cfg.alpha = 0.5;
    cfg.dual_tol = 1e-10;
    const TvProxResult r2 = tv_prox(Image(1, 2, {0.0, 2.0}), cfg);
    CHECK(r2.z.data[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r2.z.data[1] == doctest::Approx(1.5).epsilon(1e-8));

    // gap <= 2 alpha: collapses to the mean
    cfg.alpha = 2.0;
    const TvProxResult r3 = tv_prox(Image(1, 2, {0.0, 2.0}), cfg);
    CHECK(r3.z.data[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r3.z.data[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("two-pixel prox agrees with a 2D grid scan") {
    // brute force argmin of 0.5|z1|^2-ish objective over a fine grid around b
    const double alpha = 0.5;
    double best1 = 0, best2 = 0, bestval = 1e300;
    for (int i = 0; i <= 2000; ++i) {
        const double z1 = -0.5 + 3.0 * i / 2000.0;
        for (int j = 0; j <= 2000; ++j) {
            const double z2 = -0.5 + 3.0 * j / 2000.0;
            const double obj = alpha * std::fabs(z2 - z1) +
                               0.5 * (z1 - 0.0) * (z1 - 0.0) +
                               0.5 * (z2 - 2.0) * (z2 - 2.0);
            if (obj < bestval) { bestval = obj; best1 = z1; best2 = z2; }
        }
    }
    CHECK(std::fabs(best1 - 0.5) <= 2e-3);
    CHECK(std::fabs(best2 - 1.5) <= 2e-3);
}

TEST_CASE("taut-string 1D prox: hand cases and KKT certificate") {
    CHECK(tv_prox_1d_exact(Image(1, 1, {5.0}), 3.0).data[0] == 5.0);

    const Image two = tv_prox_1d_exact(Image(1, 2, {0.0, 2.0}), 0.5);
    CHECK(two.data[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.data[1] == doctest::Approx(1.5).epsilon(1e-12));

    // monotone staircase: ends shrink in by alpha, interior untouched; the
    // KKT partial-sum certificate proves global optimality of the frozen value
    const Image stair = tv_prox_1d_exact(Image(1, 4, {0.0, 1.0, 2.0, 3.0}), 0.25);
    const std::vector<double> expect = {0.25, 1.0, 2.0, 2.75};
    for (int i = 0; i < 4; ++i)
        CHECK(stair.data[i] == doctest::Approx(expect[i]).epsilon(1e-10));
    CHECK(oracles::tv1d_kkt_violation({0.0, 1.0, 2.0, 3.0}, expect, 0.25) <= 1e-12);

    oracles::Rng rng(0xA3);
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 2 + static_cast<int>(rng.uniform(0.0, 30.0));
        const Image b = random_image(rng, 1, m, -2.0, 2.0);
        const double alpha = rng.uniform(0.05, 1.5);
        const Image z = tv_prox_1d_exact(b, alpha);
        CHECK(oracles::tv1d_kkt_violation(row_of(b), row_of(z), alpha) <= 1e-9);
        // no random perturbation may improve the objective
        const double base = oracles::tv1d_objective(row_of(b), row_of(z), alpha);
        for (int p = 0; p < 20; ++p) {
            std::vector<double> zp = row_of(z);
            for (double& v : zp) v += rng.uniform(-1e-4, 1e-4);
            CHECK(oracles::tv1d_objective(row_of(b), zp, alpha) >= base - 1e-12);
        }
    }
}

TEST_CASE("tv_prox matches the taut string on single rows") {
    TvProxConfig cfg;
    cfg.dual_tol = 1e-8;
    oracles::Rng rng(0xA4);
    for (int rep = 0; rep < 20; ++rep) {
        const Image b = random_image(rng, 1, 32, 0.0, 4.0);
        cfg.alpha = rng.uniform(0.1, 1.0);
        const TvProxResult r = tv_prox(b, cfg);
        CHECK(r.converged);
        const Image z = tv_prox_1d_exact(b, cfg.alpha);
        double worst = 0.0;
        for (int i = 0; i < 32; ++i)
            worst = std::max(worst, std::fabs(r.z.data[i] - z.data[i]));
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("tv_prox preserves the mean and is nonexpansive") {
    TvProxConfig cfg;
    cfg.alpha = 0.4;
    cfg.dual_tol = 1e-9;
    oracles::Rng rng(0xA5);
    for (int rep = 0; rep < 10; ++rep) {
        const Image b1 = random_image(rng, 5, 7, -1.0, 3.0);
        const Image b2 = random_image(rng, 5, 7, -1.0, 3.0);
        const TvProxResult r1 = tv_prox(b1, cfg);
        const TvProxResult r2 = tv_prox(b2, cfg);
        CHECK(std::fabs(mean(r1.z) - mean(b1)) <= 1e-8);

        double dz = 0.0, db = 0.0;
        for (int i = 0; i < 35; ++i) {
            dz += (r1.z.data[i] - r2.z.data[i]) * (r1.z.data[i] - r2.z.data[i]);
            db += (b1.data[i] - b2.data[i]) * (b1.data[i] - b2.data[i]);
        }
        CHECK(std::sqrt(dz) <= std::sqrt(db) + 1e-6);
    }
}

TEST_CASE("tv_prox output is stationary under random perturbations") {
    TvProxConfig cfg;
    cfg.alpha = 0.6;
    cfg.dual_tol = 1e-9;
    oracles::Rng rng(0xA6);
    const Image b = random_image(rng, 4, 4, 0.0, 2.0);
    const TvProxResult r = tv_prox(b, cfg);
    CHECK(r.converged);
    CHECK(r.gap >= -1e-12);  // duality gap is a certified overestimate of error

    auto objective = [&](const Image& z) {
        double fit = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double d = z.data[i] - b.data[i];
            fit += 0.5 * d * d;
        }
        return cfg.alpha * tv_eval(z) + fit;
    };
    const double base = objective(r.z);
    for (int p = 0; p < 50; ++p) {
        Image zp = r.z;
        for (double& v : zp.data) v += rng.uniform(-1e-3, 1e-3);
        CHECK(objective(zp) >= base - cfg.dual_tol);
    }
}

TEST_CASE("warm-started prox reproduces the cold solution") {
    TvProxConfig cfg;
    cfg.alpha = 0.3;
    cfg.dual_tol = 1e-10;
    oracles::Rng rng(0xA7);
    const Image b = random_image(rng, 6, 5, 0.0, 3.0);
    const TvProxResult cold = tv_prox(b, cfg);

    std::vector<double> qv, qh;
    const TvProxResult first = tv_prox_warm(b, cfg, qv, qh);
    const TvProxResult again = tv_prox_warm(b, cfg, qv, qh);
    CHECK(again.iterations <= first.iterations);
    for (int i = 0; i < 30; ++i) {
        CHECK(std::fabs(first.z.data[i] - cold.z.data[i]) <= 1e-9);
        CHECK(std::fabs(again.z.data[i] - cold.z.data[i]) <= 1e-9);
    }

    // stale duals from a different problem must not corrupt the answer
    const Image other = random_image(rng, 6, 5, -2.0, 2.0);
    const TvProxResult cross = tv_prox_warm(other, cfg, qv, qh);
    const TvProxResult ref = tv_prox(other, cfg);
    for (int i = 0; i < 30; ++i)
        CHECK(std::fabs(cross.z.data[i] - ref.z.data[i]) <= 1e-8);
}

TEST_CASE("config validation") {
    const Image b(2, 2, 1.0);
    TvProxConfig cfg;
    cfg.step = 0.3;
    CHECK_THROWS_AS(tv_prox(b, cfg), Error);
    cfg = TvProxConfig{};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(tv_prox(b, cfg), Error);
    cfg = TvProxConfig{};
    cfg.dual_tol = 0.0;
    CHECK_THROWS_AS(tv_prox(b, cfg), Error);
    CHECK_THROWS_AS(tv_prox_1d_exact(Image(2, 2, 1.0), 0.5), DimensionError);
}

}  // TEST_SUITE
