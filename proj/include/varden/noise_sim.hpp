#pragma once

#include "varden/image.hpp"

#include <cstdint>

namespace varden {

enum class NoiseKind { poisson, gamma_multiplicative };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::poisson;
    // exposure time for poisson; observation count L (positive integer) for gamma
    double t = 1.0;
    std::uint64_t seed = 0;
};

// per-pixel counter-based stream: output depends only on (seed, pixel index),
// never on iteration order
struct PixelRng {
    std::uint64_t state;
    PixelRng(std::uint64_t seed, std::uint64_t pixel);
    std::uint64_t next_u64();
    double next_unit();  // uniform in [0, 1)
};

// x_i ~ Poisson(t v_i), independent across pixels
Image poisson_corrupt(const Image& v, const NoiseSpec& spec);

// x_i = v_i * sum of L unit exponentials, i.e. x/t is the mean of L
// exponential observations with mean v_i (Gamma(L, L/v_i) in x/t)
Image gamma_corrupt(const Image& v, const NoiseSpec& spec);

}  // namespace varden
