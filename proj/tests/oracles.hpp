// Independent brute-force oracles used to freeze expected values. These
// deliberately avoid the library's solver code paths: closed-form
// circumcenter formulas and exhaustive enumeration only.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "qcp/lp.hpp"
#include "qcp/vec.hpp"

namespace oracle {

using qcp::Box;
using qcp::Halfspace;
using qcp::Vec;

inline std::optional<Vec> circumcenter_pair(const Vec& p, const Vec& q) {
    return qcp::scaled(qcp::add(p, q), 0.5);
}

// Circumcenter of a triangle in 2D via the determinant formula.
inline std::optional<Vec> circumcenter_triple_2d(const Vec& a, const Vec& b, const Vec& c) {
    double d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    if (std::abs(d) < 1e-12) return std::nullopt;
    double a2 = qcp::norm_sq(a), b2 = qcp::norm_sq(b), c2 = qcp::norm_sq(c);
    double ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    double uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    return Vec{ux, uy};
}

inline Vec cross3(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Circumcenter of a triangle in 3D via the vector formula.
inline std::optional<Vec> circumcenter_triple_3d(const Vec& a, const Vec& b, const Vec& c) {
    Vec v1 = qcp::sub(b, a), v2 = qcp::sub(c, a);
    Vec n = cross3(v1, v2);
    double nn = qcp::norm_sq(n);
    if (nn < 1e-14) return std::nullopt;
    Vec t1 = cross3(n, v1), t2 = cross3(v2, n);
    Vec num = qcp::add(qcp::scaled(t1, qcp::norm_sq(v2)), qcp::scaled(t2, qcp::norm_sq(v1)));
    return qcp::axpy(a, 0.5 / nn, num);
}

// Equidistant point of four points in 3D: 3x3 linear system by Gauss.
inline std::optional<Vec> circumcenter_quad_3d(const std::vector<Vec>& p) {
    double A[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) A[i][j] = 2.0 * (p[i + 1][j] - p[0][j]);
        A[i][3] = qcp::norm_sq(p[i + 1]) - qcp::norm_sq(p[0]);
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-10) return std::nullopt;
        for (int c = 0; c < 4; ++c) std::swap(A[piv][c], A[col][c]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int c = col; c < 4; ++c) A[r][c] -= f * A[col][c];
        }
    }
    return Vec{A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]};
}

struct BruteBall {
    Vec center;
    double radius = qcp::kInfinity;
};

// Exhaustive smallest enclosing ball over balls determined by pairs,
// triples, and (in 3D) quadruples, plus singletons.
inline BruteBall seb_brute(const std::vector<Vec>& pts) {
    std::size_t n = pts.size();
    std::size_t d = pts[0].size();
    BruteBall best;
    auto consider = [&](const std::optional<Vec>& center) {
        if (!center) return;
        double r = 0.0;
        for (const Vec& p : pts) r = std::max(r, qcp::distance(*center, p));
        if (r < best.radius) best = BruteBall{*center, r};
    };
    // A candidate ball must contain all points; the max-distance radius
    // makes every candidate valid, and minimality comes from enumeration.
    for (std::size_t i = 0; i < n; ++i) consider(pts[i]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) consider(circumcenter_pair(pts[i], pts[j]));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                consider(d == 2 ? circumcenter_triple_2d(pts[i], pts[j], pts[k])
                                : circumcenter_triple_3d(pts[i], pts[j], pts[k]));
    if (d == 3)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k)
                    for (std::size_t l = k + 1; l < n; ++l)
                        consider(circumcenter_quad_3d({pts[i], pts[j], pts[k], pts[l]}));
    return best;
}

struct LpOracleResult {
    bool feasible = false;
    double value = 0.0;
    Vec point;
};

// Exhaustive vertex enumeration for min c.x over halfspaces + box: every
// optimum of a bounded LP sits at an intersection of d constraint/box
// boundaries. Ties are broken toward the lexicographically least point.
inline LpOracleResult lp_vertex_enum(const std::vector<Halfspace>& cons, const Vec& c,
                                     const Box& box) {
    std::size_t d = box.dim();
    std::vector<Halfspace> all = cons;
    for (std::size_t j = 0; j < d; ++j) {
        Vec lo(d, 0.0), hi(d, 0.0);
        lo[j] = 1.0;
        hi[j] = -1.0;
        all.push_back({lo, box.lo[j]});
        all.push_back({hi, -box.hi[j]});
    }
    std::size_t m = all.size();
    auto feasible = [&](const Vec& x) {
        if (!box.contains(x, 1e-7)) return false;
        for (const auto& h : cons)
            if (qcp::dot(h.normal, x) < h.offset - 1e-7 * (1.0 + std::abs(h.offset))) return false;
        return true;
    };
    auto solve_subset = [&](const std::vector<std::size_t>& idx) -> std::optional<Vec> {
        std::vector<std::vector<double>> A(d, std::vector<double>(d + 1));
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) A[i][j] = all[idx[i]].normal[j];
            A[i][d] = all[idx[i]].offset;
        }
        for (std::size_t col = 0; col < d; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < d; ++r)
                if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
            if (std::abs(A[piv][col]) < 1e-10) return std::nullopt;
            std::swap(A[piv], A[col]);
            for (std::size_t r = 0; r < d; ++r) {
                if (r == col) continue;
                double f = A[r][col] / A[col][col];
                for (std::size_t cc = col; cc <= d; ++cc) A[r][cc] -= f * A[col][cc];
            }
        }
        Vec x(d);
        for (std::size_t i = 0; i < d; ++i) x[i] = A[i][d] / A[i][i];
        return x;
    };

    LpOracleResult best;
    auto consider = [&](const Vec& x) {
        if (!feasible(x)) return;
        double v = qcp::dot(c, x);
        if (!best.feasible) {
            best = LpOracleResult{true, v, x};
            return;
        }
        double tol = 1e-9 * (1.0 + std::abs(v) + std::abs(best.value));
        if (v < best.value - tol) {
            best = LpOracleResult{true, v, x};
        } else if (v <= best.value + tol) {
            for (std::size_t j = 0; j < d; ++j) {
                if (x[j] < best.point[j] - 1e-9) {
                    best = LpOracleResult{true, std::min(v, best.value), x};
                    break;
                }
                if (x[j] > best.point[j] + 1e-9) break;
            }
        }
    };
    std::vector<std::size_t> idx(d);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t k) {
        if (k == d) {
            auto x = solve_subset(idx);
            if (x) consider(*x);
            return;
        }
        for (std::size_t i = start; i < m; ++i) {
            idx[k] = i;
            rec(i + 1, k + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace oracle
