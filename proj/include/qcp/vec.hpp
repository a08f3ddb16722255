#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qcp {

/// Dense point/direction in R^d. Dimension is a runtime value; all
/// coordinates are 64-bit floats.
using Vec = std::vector<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline void check_same_dim(const Vec& a, const Vec& b, const char* what) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

inline double dot(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline Vec add(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

/// a + s*b
inline Vec axpy(const Vec& a, double s, const Vec& b) {
    check_same_dim(a, b, "axpy");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
}

inline double distance(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("normalized: zero vector");
    return scaled(a, 1.0 / n);
}

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// Axis-aligned box confining a search. Extents must be finite and positive.
struct Box {
    Vec lo;
    Vec hi;

    Box() = default;
    Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size())
            throw std::invalid_argument("Box: lo/hi dimension mismatch");
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (!(lo[i] < hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
                throw std::invalid_argument("Box: extents must be finite and positive");
        }
    }

    /// Cube [-half, half]^d.
    static Box cube(std::size_t d, double half) {
        return Box(Vec(d, -half), Vec(d, half));
    }

    std::size_t dim() const { return lo.size(); }

    bool contains(const Vec& x, double pad = 0.0) const {
        if (x.size() != lo.size()) return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
        return true;
    }

    Vec center() const {
        Vec c(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }

    double diameter() const { return distance(lo, hi); }
};

}  // namespace qcp
