#include "varden/noise_sim.hpp"

#include <cmath>

namespace varden {

namespace {

std::uint64_t splitmix_step(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

PixelRng::PixelRng(std::uint64_t seed, std::uint64_t pixel) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix_step(s);
    state = a ^ (pixel * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EEFCDULL);
    (void)splitmix_step(state);  // decorrelate neighboring pixel keys
}

std::uint64_t PixelRng::next_u64() { return splitmix_step(state); }

double PixelRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

namespace {

// Knuth product method; exact, O(rate) uniforms
long poisson_small(PixelRng& rng, double rate) {
    const double limit = std::exp(-rate);
    long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_unit();
    } while (p > limit);
    return k - 1;
}

// Hormann's transformed rejection (PTRD); exact for rate >= 10
long poisson_large(PixelRng& rng, double rate) {
    const double smu = std::sqrt(rate);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_rate = std::log(rate);
    for (;;) {
        const double u = rng.next_unit() - 0.5;
        const double v = rng.next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const long k = static_cast<long>(kf);
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -rate + kf * log_rate - std::lgamma(kf + 1.0))
            return k;
    }
}

long poisson_draw(PixelRng& rng, double rate) {
    if (rate == 0.0) return 0;
    return rate < 30.0 ? poisson_small(rng, rate) : poisson_large(rng, rate);
}

}  // namespace

Image poisson_corrupt(const Image& v, const NoiseSpec& spec) {
    if (spec.kind != NoiseKind::poisson)
        throw Error("poisson_corrupt: spec.kind mismatch");
    if (!(spec.t > 0.0)) throw Error("poisson_corrupt: t must be positive");
    require_finite(v, "poisson_corrupt");
    for (double vi : v.data)
        if (vi < 0.0) throw DomainError("poisson_corrupt: negative intensities");
    Image x(v.rows, v.cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
        PixelRng rng(spec.seed, i);
        x.data[i] = static_cast<double>(poisson_draw(rng, spec.t * v.data[i]));
    }
    return x;
}

Image gamma_corrupt(const Image& v, const NoiseSpec& spec) {
    if (spec.kind != NoiseKind::gamma_multiplicative)
        throw Error("gamma_corrupt: spec.kind mismatch");
    const double L = spec.t;
    if (!(L >= 1.0) || std::floor(L) != L)
        throw Error("gamma_corrupt: t must be a positive integer observation count");
    require_finite(v, "gamma_corrupt");
    for (double vi : v.data)
        if (vi <= 0.0) throw DomainError("gamma_corrupt: intensities must be positive");
    const long n_obs = static_cast<long>(L);
    Image x(v.rows, v.cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
        PixelRng rng(spec.seed, i);
        double s = 0.0;
        for (long j = 0; j < n_obs; ++j) s += -std::log1p(-rng.next_unit());
        x.data[i] = v.data[i] * s;  // x = L * (mean of L exponentials with mean v_i)
    }
    return x;
}

}  // namespace varden
