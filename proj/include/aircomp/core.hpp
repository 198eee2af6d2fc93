#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace aircomp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

/// Dense row-major matrix of doubles. Rows index sensors, columns index slots.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic randomness: everything seedable uses std::mt19937_64, whose
// output sequence is fixed by the C++ standard, mapped to doubles via the
// explicit 53-bit conversions below. No std::*_distribution anywhere.

inline double u01(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }  // [0,1)
inline double u01_open(std::uint64_t bits) { return (double(bits >> 11) + 1.0) * 0x1.0p-53; }  // (0,1]

inline double uniform(std::mt19937_64& g) { return u01(g()); }
inline double uniform(std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * u01(g()); }
inline double log_uniform(std::mt19937_64& g, double lo, double hi) {
    return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

/// Standard normal pair via Box-Muller.
inline void normal_pair(std::mt19937_64& g, double& z0, double& z1) {
    double u1 = u01_open(g());
    double u2 = u01(g());
    double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(2.0 * M_PI * u2);
    z1 = r * std::sin(2.0 * M_PI * u2);
}

/// splitmix64 step; used to derive independent per-sample streams in the
/// Monte-Carlo validator so estimates do not depend on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace aircomp
