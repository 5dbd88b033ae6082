#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace varden {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// input outside the mathematical domain of an operation (boundary or beyond)
struct DomainError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// malformed file contents; offset is the byte position of the problem
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " at byte " + std::to_string(byte_offset)), offset(byte_offset) {}
    std::size_t offset;
};

// n1 x n2 pixel grid, row-major doubles
struct Image {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Image() = default;
    Image(int n1, int n2, double fill = 0.0)
        : rows(n1), cols(n2), data(static_cast<std::size_t>(n1) * n2, fill) {
        if (n1 <= 0 || n2 <= 0)
            throw DimensionError("image dimensions must be positive");
    }
    Image(int n1, int n2, std::vector<double> d) : rows(n1), cols(n2), data(std::move(d)) {
        if (n1 <= 0 || n2 <= 0 || data.size() != static_cast<std::size_t>(n1) * n2)
            throw DimensionError("image data length does not match rows*cols");
    }

    std::size_t size() const { return data.size(); }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    bool same_shape(const Image& o) const { return rows == o.rows && cols == o.cols; }
};

inline void require_finite(const Image& im, const char* who) {
    for (double v : im.data)
        if (!std::isfinite(v))
            throw DomainError(std::string(who) + ": image contains non-finite values");
}

inline void require_same_shape(const Image& a, const Image& b, const char* who) {
    if (!a.same_shape(b))
        throw DimensionError(std::string(who) + ": image shapes differ");
}

inline double dot(const Image& a, const Image& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

inline double norm2(const Image& a) {
    return std::sqrt(dot(a, a));
}

inline double norm_inf(const Image& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::fabs(v));
    return m;
}

inline double mean(const Image& a) {
    double s = 0.0;
    for (double v : a.data) s += v;
    return s / static_cast<double>(a.size());
}

}  // namespace varden
