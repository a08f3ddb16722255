#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "qcp/core.hpp"
#include "qcp/vec.hpp"

namespace qcp {

/// Closed linear inequality: normal . x >= offset.
struct Halfspace {
    Vec normal;
    double offset = 0.0;
};

namespace detail {

// Internal state for the randomized incremental LP. The objective is a
// stack of affine rows compared lexicographically: row 0 is the linear
// objective c.x, rows 1..d are the coordinate functions x_0..x_{d-1}, so
// the minimizer is unique (the lexicographically least optimal point).
struct LexLp {
    struct Row {
        Vec coeff;
        double constant = 0.0;
    };
    std::vector<Halfspace> cons;
    Vec lo, hi;
    std::vector<Row> rows;

    std::size_t dim() const { return lo.size(); }

    double row_value(const Row& r, const Vec& x) const { return r.constant + dot(r.coeff, x); }

    // Lexicographically best box corner: scan rows in order; each row fixes
    // the still-free coordinates it depends on. Valid because rows are
    // linear and the box is a coordinate product.
    Vec box_optimum() const {
        std::size_t d = dim();
        Vec x(d);
        std::vector<bool> fixed(d, false);
        for (const Row& r : rows) {
            double scale = norm_inf(r.coeff);
            for (std::size_t j = 0; j < d; ++j) {
                if (fixed[j] || std::abs(r.coeff[j]) <= 1e-14 * std::max(1.0, scale)) continue;
                x[j] = r.coeff[j] > 0 ? lo[j] : hi[j];
                fixed[j] = true;
            }
        }
        for (std::size_t j = 0; j < d; ++j)
            if (!fixed[j]) x[j] = lo[j];
        return x;
    }

    double violation_tol(const Halfspace& h, const Vec& x) const {
        double scale = std::abs(h.offset);
        for (std::size_t j = 0; j < x.size(); ++j) scale += std::abs(h.normal[j] * x[j]);
        return 1e-11 * std::max(1.0, scale);
    }

    bool violates(const Halfspace& h, const Vec& x) const {
        return dot(h.normal, x) < h.offset - violation_tol(h, x);
    }
};

// One-dimensional base case: intersect the interval, then pick the
// lexicographically better endpoint under the row stack.
inline std::optional<Vec> lex_lp_1d(const LexLp& p) {
    double L = p.lo[0], H = p.hi[0];
    for (const Halfspace& h : p.cons) {
        double a = h.normal[0], b = h.offset;
        double scale = std::max({1.0, std::abs(b), std::max(std::abs(L), std::abs(H))});
        if (std::abs(a) <= 1e-13 * scale) {
            if (b > 1e-11 * scale) return std::nullopt;  // 0 >= b infeasible
            continue;
        }
        if (a > 0)
            L = std::max(L, b / a);
        else
            H = std::min(H, b / a);
    }
    double span_scale = std::max({1.0, std::abs(L), std::abs(H)});
    if (L > H + 1e-11 * span_scale) return std::nullopt;
    if (L > H) L = H = 0.5 * (L + H);
    for (const auto& r : p.rows) {
        double vl = p.row_value(r, {L});
        double vh = p.row_value(r, {H});
        double tol = 1e-13 * std::max({1.0, std::abs(vl), std::abs(vh)});
        if (vl < vh - tol) return Vec{L};
        if (vh < vl - tol) return Vec{H};
    }
    return Vec{L};
}

inline std::optional<Vec> lex_lp_solve(LexLp& p, std::mt19937_64& rng);

// Restrict the problem to the hyperplane h.normal . x = h.offset by
// eliminating the coordinate with the largest normal component. Only the
// first `upto` constraints take part in the subproblem.
inline std::optional<Vec> lex_lp_on_hyperplane(const LexLp& p, const Halfspace& h,
                                               std::size_t upto, std::mt19937_64& rng) {
    std::size_t d = p.dim();
    std::size_t piv = 0;
    for (std::size_t j = 1; j < d; ++j)
        if (std::abs(h.normal[j]) > std::abs(h.normal[piv])) piv = j;
    if (h.normal[piv] == 0.0) throw std::invalid_argument("seidel_lp: zero constraint normal");

    // x_piv = beta - sum_j gamma_j x_j over the remaining coordinates.
    double beta = h.offset / h.normal[piv];
    Vec gamma(d - 1);
    {
        std::size_t t = 0;
        for (std::size_t j = 0; j < d; ++j)
            if (j != piv) gamma[t++] = h.normal[j] / h.normal[piv];
    }
    auto reduce_vec = [&](const Vec& v, double& carry) {
        Vec r(d - 1);
        std::size_t t = 0;
        for (std::size_t j = 0; j < d; ++j)
            if (j != piv) r[t++] = v[j];
        carry = v[piv];
        return r;
    };

    LexLp sub;
    sub.lo.reserve(d - 1);
    sub.hi.reserve(d - 1);
    for (std::size_t j = 0; j < d; ++j) {
        if (j == piv) continue;
        sub.lo.push_back(p.lo[j]);
        sub.hi.push_back(p.hi[j]);
    }
    sub.cons.reserve(upto + 2);
    for (std::size_t i = 0; i < upto; ++i) {
        double ap;
        Vec a = reduce_vec(p.cons[i].normal, ap);
        for (std::size_t j = 0; j + 1 < d; ++j) a[j] -= ap * gamma[j];
        sub.cons.push_back({std::move(a), p.cons[i].offset - ap * beta});
    }
    // Box bounds of the eliminated coordinate become ordinary constraints.
    {
        Vec a(d - 1);
        for (std::size_t j = 0; j + 1 < d; ++j) a[j] = -gamma[j];
        sub.cons.push_back({a, p.lo[piv] - beta});       // x_piv >= lo
        sub.cons.push_back({gamma, beta - p.hi[piv]});   // x_piv <= hi
    }
    sub.rows.reserve(p.rows.size());
    for (const auto& r : p.rows) {
        double cp;
        Vec c = reduce_vec(r.coeff, cp);
        for (std::size_t j = 0; j + 1 < d; ++j) c[j] -= cp * gamma[j];
        sub.rows.push_back({std::move(c), r.constant + cp * beta});
    }

    auto y = lex_lp_solve(sub, rng);
    if (!y) return std::nullopt;
    Vec x(d);
    double xp = beta;
    std::size_t t = 0;
    for (std::size_t j = 0; j < d; ++j) {
        if (j == piv) continue;
        x[j] = (*y)[t];
        xp -= gamma[t] * (*y)[t];
        ++t;
    }
    x[piv] = xp;
    return x;
}

// Seidel's randomized incremental algorithm. Constraints are inserted in a
// random order; when the current optimum violates constraint i the optimum
// of the first i+1 constraints lies on its boundary, so we recurse on that
// hyperplane with one fewer dimension.
inline std::optional<Vec> lex_lp_solve(LexLp& p, std::mt19937_64& rng) {
    if (p.dim() == 1) return lex_lp_1d(p);
    std::shuffle(p.cons.begin(), p.cons.end(), rng);
    Vec x = p.box_optimum();
    for (std::size_t i = 0; i < p.cons.size(); ++i) {
        const Halfspace& h = p.cons[i];
        double nscale = norm_inf(h.normal);
        if (nscale <= 1e-13 * std::max(1.0, std::abs(h.offset))) {
            if (h.offset > 1e-11) return std::nullopt;
            continue;
        }
        if (!p.violates(h, x)) continue;
        auto sol = lex_lp_on_hyperplane(p, h, i, rng);
        if (!sol) return std::nullopt;
        x = *sol;
    }
    return x;
}

}  // namespace detail

/// Low-dimensional linear program: minimize c.x over the halfspaces and
/// the box, returning the lexicographically least optimal point. The seed
/// only affects the insertion order (running time), never the result.
inline std::optional<SolutionValue> seidel_lp(const std::vector<Halfspace>& halfspaces,
                                              const Vec& objective, const Box& box,
                                              std::uint64_t rng_seed = 0) {
    std::size_t d = box.dim();
    if (d == 0) throw std::invalid_argument("seidel_lp: empty box");
    if (d > 16) throw std::invalid_argument("seidel_lp: unsupported dimension (d > 16)");
    if (objective.size() != d) throw std::invalid_argument("seidel_lp: objective dimension");
    for (const auto& h : halfspaces) {
        if (h.normal.size() != d) throw std::invalid_argument("seidel_lp: constraint dimension");
        if (norm_inf(h.normal) == 0.0) throw std::invalid_argument("seidel_lp: zero constraint normal");
    }

    detail::LexLp p;
    p.cons = halfspaces;
    p.lo = box.lo;
    p.hi = box.hi;
    p.rows.reserve(d + 1);
    p.rows.push_back({objective, 0.0});
    for (std::size_t j = 0; j < d; ++j) {
        Vec e(d, 0.0);
        e[j] = 1.0;
        p.rows.push_back({std::move(e), 0.0});
    }
    std::mt19937_64 rng(rng_seed);
    auto x = detail::lex_lp_solve(p, rng);
    if (!x) return std::nullopt;
    return SolutionValue{dot(objective, *x), *x};
}

/// A minimal constraint subset determining an LP-type problem's value.
struct Basis {
    std::vector<int> indices;  // sorted
    SolutionValue value;
};

/// Primitive operations of an LP-type problem: the violation test and the
/// small-subproblem solver (index sets of size at most dim+1).
struct LpTypeOracle {
    int dim = 0;
    std::function<bool(const Basis&, int)> violates;
    std::function<Basis(const std::vector<int>&)> solve_small;
};

namespace detail {

// Sharir-Welzl style randomized solve: drop a random non-basis constraint,
// solve the rest, and repair with a basis-change when the dropped
// constraint is violated. Expected linear number of violation tests at
// fixed dimension.
inline Basis lp_type_rec(std::vector<int> active, Basis basis, const LpTypeOracle& oracle,
                         std::mt19937_64& rng) {
    std::vector<int> free;
    free.reserve(active.size());
    for (int i : active)
        if (std::find(basis.indices.begin(), basis.indices.end(), i) == basis.indices.end())
            free.push_back(i);
    if (free.empty()) return basis;

    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    int dropped = free[pick(rng)];
    std::vector<int> rest;
    rest.reserve(active.size() - 1);
    for (int i : active)
        if (i != dropped) rest.push_back(i);

    Basis b = lp_type_rec(std::move(rest), std::move(basis), oracle, rng);
    if (!oracle.violates(b, dropped)) return b;

    std::vector<int> grown = b.indices;
    grown.push_back(dropped);
    std::sort(grown.begin(), grown.end());
    return lp_type_rec(std::move(active), oracle.solve_small(grown), oracle, rng);
}

}  // namespace detail

/// Generic LP-type solve over constraints 0..n-1. The caller's oracle must
/// satisfy monotonicity and locality; basis-change subproblems may be
/// solved numerically, in which case no exactness claim transfers to the
/// result (accuracy is the oracle's contract).
inline Basis lp_type_solve(int n, const LpTypeOracle& oracle, std::uint64_t rng_seed = 0) {
    if (n <= 0) throw std::invalid_argument("lp_type_solve: need at least one constraint");
    std::mt19937_64 rng(rng_seed);
    std::vector<int> active(static_cast<std::size_t>(n));
    std::iota(active.begin(), active.end(), 0);
    Basis b0 = oracle.solve_small({0});
    return detail::lp_type_rec(std::move(active), std::move(b0), oracle, rng);
}

namespace detail {

// Smallest ball with the given affinely independent points on its
// boundary. Solves the Gram system 2 G t = g in the affine hull; returns
// nullopt when the points are (nearly) affinely dependent.
inline std::optional<std::pair<Vec, double>> ball_through(const std::vector<Vec>& pts) {
    std::size_t m = pts.size();
    if (m == 1) return std::make_pair(pts[0], 0.0);
    std::size_t k = m - 1;
    std::vector<Vec> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = sub(pts[i + 1], pts[0]);
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1));
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            A[i][j] = 2.0 * dot(v[i], v[j]);
            scale = std::max(scale, std::abs(A[i][j]));
        }
        A[i][k] = norm_sq(v[i]);
    }
    // Gaussian elimination, partial pivoting.
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) <= 1e-12 * std::max(1.0, scale)) return std::nullopt;
        std::swap(A[piv], A[col]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= k; ++c) A[r][c] -= f * A[col][c];
        }
    }
    Vec center = pts[0];
    for (std::size_t i = 0; i < k; ++i) {
        double t = A[i][k] / A[i][i];
        for (std::size_t j = 0; j < center.size(); ++j) center[j] += t * v[i][j];
    }
    return std::make_pair(center, distance(center, pts[0]));
}

}  // namespace detail

/// Exact minimum enclosing ball of at most d+2 points (d in {2,3}), by
/// enumerating boundary subsets of size <= d+1. Containment uses a 1e-12
/// relative slack; degenerate subsets fall through to smaller ones.
/// Returns the ball and the boundary subset (as positions into `points`).
struct SmallBall {
    Vec center;
    double radius = 0.0;
    std::vector<int> support;
};

inline SmallBall seb_basis(const std::vector<Vec>& points) {
    if (points.empty()) throw std::invalid_argument("seb_basis: empty input");
    std::size_t d = points[0].size();
    if (d != 2 && d != 3) throw std::invalid_argument("seb_basis: dimension must be 2 or 3");
    if (points.size() > d + 2) throw std::invalid_argument("seb_basis: too many points");

    const std::size_t n = points.size();
    SmallBall best;
    best.radius = kInfinity;
    std::vector<int> subset;
    auto consider = [&](const std::vector<int>& idx) {
        std::vector<Vec> sel;
        sel.reserve(idx.size());
        for (int i : idx) sel.push_back(points[static_cast<std::size_t>(i)]);
        auto ball = detail::ball_through(sel);
        if (!ball) return;
        auto& [c, r] = *ball;
        double slack = 1e-12 * (1.0 + r);
        for (const Vec& p : points)
            if (distance(c, p) > r + slack) return;
        if (r < best.radius) best = SmallBall{c, r, idx};
    };
    // All subsets of size 1..d+1.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t want) {
        if (subset.size() == want) {
            consider(subset);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            subset.push_back(static_cast<int>(i));
            rec(i + 1, want);
            subset.pop_back();
        }
    };
    for (std::size_t sz = 1; sz <= std::min(n, d + 1); ++sz) rec(0, sz);
    if (!std::isfinite(best.radius)) throw std::runtime_error("seb_basis: no enclosing ball found");
    return best;
}

/// Randomized smallest enclosing ball of a point set (d in {2,3}) via the
/// LP-type engine with the subset-enumeration basis solver. The basis has
/// at most d+1 points; the seed never changes the returned ball.
struct SebResult {
    Vec center;
    double radius = 0.0;
    std::vector<int> basis;
};

inline SebResult smallest_enclosing_ball(const std::vector<Vec>& points,
                                         std::uint64_t rng_seed = 0) {
    if (points.empty()) throw std::invalid_argument("smallest_enclosing_ball: empty input");
    std::size_t d = points[0].size();
    if (d != 2 && d != 3)
        throw std::invalid_argument("smallest_enclosing_ball: dimension must be 2 or 3");
    for (const Vec& p : points)
        if (p.size() != d) throw std::invalid_argument("smallest_enclosing_ball: mixed dimensions");

    LpTypeOracle oracle;
    oracle.dim = static_cast<int>(d) + 1;
    oracle.violates = [&points](const Basis& b, int i) {
        double slack = 1e-12 * (1.0 + b.value.level);
        return distance(b.value.point, points[static_cast<std::size_t>(i)]) >
               b.value.level + slack;
    };
    oracle.solve_small = [&points](const std::vector<int>& idx) {
        std::vector<Vec> sel;
        sel.reserve(idx.size());
        for (int i : idx) sel.push_back(points[static_cast<std::size_t>(i)]);
        SmallBall ball = seb_basis(sel);
        Basis b;
        for (int pos : ball.support) b.indices.push_back(idx[static_cast<std::size_t>(pos)]);
        std::sort(b.indices.begin(), b.indices.end());
        b.value = SolutionValue{ball.radius, ball.center};
        return b;
    };
    Basis b = lp_type_solve(static_cast<int>(points.size()), oracle, rng_seed);
    return SebResult{b.value.point, b.value.level, b.indices};
}

}  // namespace qcp
