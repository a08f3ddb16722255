#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcp/lp.hpp"
#include "qcp/vec.hpp"

namespace qcp {

inline double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Convex polygon, counterclockwise vertex order.
struct ConvexPolygon {
    std::vector<Vec> vertices;

    double area() const {
        double s = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const Vec& p = vertices[i];
            const Vec& q = vertices[(i + 1) % vertices.size()];
            s += p[0] * q[1] - q[0] * p[1];
        }
        return 0.5 * s;
    }

    Vec centroid() const {
        Vec c{0.0, 0.0};
        for (const Vec& v : vertices) {
            c[0] += v[0];
            c[1] += v[1];
        }
        c[0] /= static_cast<double>(vertices.size());
        c[1] /= static_cast<double>(vertices.size());
        return c;
    }

    bool contains(const Vec& x, double pad = 1e-9) const {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const Vec& p = vertices[i];
            const Vec& q = vertices[(i + 1) % vertices.size()];
            Vec e = sub(q, p);
            if (cross2(e, sub(x, p)) < -pad * std::max(1.0, norm(e))) return false;
        }
        return true;
    }
};

/// Intersection of halfplanes (normal.x >= offset) clipped to a bounding
/// box, by incremental polygon clipping. Empty result -> nullopt.
inline std::optional<ConvexPolygon> halfplane_intersection(const std::vector<Halfspace>& halfplanes,
                                                           const Box& box) {
    if (box.dim() != 2) throw std::invalid_argument("halfplane_intersection: box must be 2D");
    std::vector<Vec> poly = {{box.lo[0], box.lo[1]},
                             {box.hi[0], box.lo[1]},
                             {box.hi[0], box.hi[1]},
                             {box.lo[0], box.hi[1]}};
    for (const Halfspace& h : halfplanes) {
        if (h.normal.size() != 2)
            throw std::invalid_argument("halfplane_intersection: halfplane must be 2D");
        double nn = norm(h.normal);
        if (nn == 0.0) throw std::invalid_argument("halfplane_intersection: zero normal");
        std::vector<Vec> next;
        next.reserve(poly.size() + 1);
        auto offset_of = [&](const Vec& p) { return dot(h.normal, p) - h.offset; };
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec& p = poly[i];
            const Vec& q = poly[(i + 1) % poly.size()];
            double dp = offset_of(p), dq = offset_of(q);
            double eps = 1e-12 * nn * std::max(1.0, std::max(norm(p), norm(q)));
            bool pin = dp >= -eps, qin = dq >= -eps;
            if (pin) next.push_back(p);
            if (pin != qin) {
                double t = dp / (dp - dq);
                next.push_back(axpy(p, t, sub(q, p)));
            }
        }
        poly = std::move(next);
        if (poly.size() < 3) return std::nullopt;
    }
    // Drop duplicate and collinear vertices.
    std::vector<Vec> cleaned;
    for (const Vec& v : poly) {
        if (!cleaned.empty() && distance(cleaned.back(), v) < 1e-10) continue;
        cleaned.push_back(v);
    }
    while (cleaned.size() > 1 && distance(cleaned.front(), cleaned.back()) < 1e-10)
        cleaned.pop_back();
    std::vector<Vec> out;
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
        const Vec& a = cleaned[(i + cleaned.size() - 1) % cleaned.size()];
        const Vec& b = cleaned[i];
        const Vec& c = cleaned[(i + 1) % cleaned.size()];
        if (std::abs(cross2(sub(b, a), sub(c, b))) > 1e-12 * std::max(1.0, norm(sub(c, a))))
            out.push_back(b);
    }
    if (out.size() < 3) return std::nullopt;
    ConvexPolygon result{std::move(out)};
    if (result.area() <= 1e-14) return std::nullopt;
    return result;
}

namespace detail {

inline bool segments_properly_intersect(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    auto side = [](const Vec& p, const Vec& q, const Vec& r) {
        return cross2(sub(q, p), sub(r, p));
    };
    double scale = std::max({norm(sub(b, a)), norm(sub(d, c)), 1.0});
    double eps = 1e-12 * scale * scale;
    double d1 = side(a, b, c), d2 = side(a, b, d);
    double d3 = side(c, d, a), d4 = side(c, d, b);
    // Endpoint touches and collinear overlaps do not count as proper.
    bool split1 = (d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps);
    bool split2 = (d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps);
    return split1 && split2;
}

}  // namespace detail

inline ConvexPolygon polygon_kernel(const std::vector<Vec>& vertices);

/// Simple polygon whose kernel is nonempty (checked at construction).
/// Vertices are in counterclockwise order.
struct StarPolygon {
    std::vector<Vec> vertices;

    explicit StarPolygon(std::vector<Vec> verts) : vertices(std::move(verts)) {
        if (vertices.size() < 3) throw std::invalid_argument("StarPolygon: need >= 3 vertices");
        for (const Vec& v : vertices)
            if (v.size() != 2) throw std::invalid_argument("StarPolygon: vertices must be 2D");
        std::size_t n = vertices.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                // Adjacent edges share an endpoint and may touch there.
                if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                if (detail::segments_properly_intersect(vertices[i], vertices[(i + 1) % n],
                                                        vertices[j], vertices[(j + 1) % n]))
                    throw std::invalid_argument("StarPolygon: polygon is not simple");
            }
        polygon_kernel(vertices);  // throws when the kernel is empty
    }
};

/// Kernel of a star-shaped polygon: intersection of the inner halfplanes
/// of all edges. Throws when empty (input not star-shaped).
inline ConvexPolygon polygon_kernel(const std::vector<Vec>& vertices) {
    std::size_t n = vertices.size();
    if (n < 3) throw std::invalid_argument("polygon_kernel: need >= 3 vertices");
    Vec lo{kInfinity, kInfinity}, hi{-kInfinity, -kInfinity};
    for (const Vec& v : vertices) {
        lo[0] = std::min(lo[0], v[0]);
        lo[1] = std::min(lo[1], v[1]);
        hi[0] = std::max(hi[0], v[0]);
        hi[1] = std::max(hi[1], v[1]);
    }
    double pad = 1e-9 + 1e-9 * std::max(hi[0] - lo[0], hi[1] - lo[1]);
    Box bbox({lo[0] - pad, lo[1] - pad}, {hi[0] + pad, hi[1] + pad});
    std::vector<Halfspace> inner;
    inner.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& p = vertices[i];
        const Vec& q = vertices[(i + 1) % n];
        Vec e = sub(q, p);
        Vec normal{-e[1], e[0]};  // interior is left of each CCW edge
        inner.push_back({normal, dot(normal, p)});
    }
    auto k = halfplane_intersection(inner, bbox);
    if (!k) throw std::invalid_argument("polygon_kernel: empty kernel (not star-shaped)");
    return *k;
}

inline ConvexPolygon polygon_kernel(const StarPolygon& p) { return polygon_kernel(p.vertices); }

/// 180 degrees minus the angle subtended at v by the segment uw.
/// Computed from atan2 of cross/dot for stability near 0 and 180.
inline double complementary_angle(const Vec& u, const Vec& w, const Vec& v) {
    Vec a = sub(u, v), b = sub(w, v);
    if (norm(a) == 0.0 || norm(b) == 0.0)
        throw std::invalid_argument("complementary_angle: v coincides with u or w");
    double ang = std::atan2(std::abs(cross2(a, b)), dot(a, b));
    return 180.0 - ang * 180.0 / std::numbers::pi;
}

/// Gradient with respect to v of the unsigned angle at v (radians) in
/// triangle uvw.
inline Vec angle_at_v_gradient(const Vec& u, const Vec& w, const Vec& v) {
    Vec a = sub(u, v), b = sub(w, v);
    double c = cross2(a, b), d = dot(a, b);
    double den = c * c + d * d;
    if (den == 0.0) throw std::invalid_argument("angle_at_v_gradient: degenerate triangle");
    // theta = atan2(c, d); d(theta)/da and d(theta)/db, then da/dv = db/dv = -I.
    Vec dta{(d * b[1] - c * b[0]) / den, (d * -b[0] - c * b[1]) / den};
    Vec dtb{(d * -a[1] - c * a[0]) / den, (d * a[0] - c * a[1]) / den};
    double sign = c >= 0 ? 1.0 : -1.0;  // |theta| for either orientation
    return {-sign * (dta[0] + dtb[0]), -sign * (dta[1] + dtb[1])};
}

/// Gradient with respect to q of the unsigned angle (radians) between a
/// fixed vector p and a varying vector q.
inline Vec angle_between_gradient_q(const Vec& p, const Vec& q) {
    double c = cross2(p, q), d = dot(p, q);
    double den = c * c + d * d;
    if (den == 0.0) throw std::invalid_argument("angle_between_gradient_q: degenerate");
    double sign = c >= 0 ? 1.0 : -1.0;
    return {sign * (d * -p[1] - c * p[0]) / den, sign * (d * p[0] - c * p[1]) / den};
}

/// Point of the Klein model: Euclidean coordinates strictly inside the
/// unit ball.
struct KleinPoint {
    Vec coords;

    explicit KleinPoint(Vec c) : coords(std::move(c)) {
        if (norm(coords) >= 1.0 - 1e-12)
            throw std::invalid_argument("KleinPoint: norm must be < 1");
    }
};

namespace detail {

// Lift to the hyperboloid: x -> (x, 1)/sqrt(1 - |x|^2). The Minkowski
// product of two lifted points is (x.y - 1)/sqrt((1-|x|^2)(1-|y|^2)),
// which is <= -1; the distance is acosh of its absolute value.
inline double klein_minkowski(const Vec& x, const Vec& y) {
    double nx = norm_sq(x), ny = norm_sq(y);
    return (dot(x, y) - 1.0) / std::sqrt((1.0 - nx) * (1.0 - ny));
}

}  // namespace detail

inline double hyperbolic_distance(const Vec& p, const Vec& q) {
    if (norm(p) >= 1.0 - 1e-12 || norm(q) >= 1.0 - 1e-12)
        throw std::invalid_argument("hyperbolic_distance: point outside the Klein ball");
    double m = std::abs(detail::klein_minkowski(p, q));
    return std::acosh(std::max(1.0, m));
}

inline double hyperbolic_distance(const KleinPoint& p, const KleinPoint& q) {
    return hyperbolic_distance(p.coords, q.coords);
}

/// Gradient with respect to x of hyperbolic_distance(x, p), in Klein
/// coordinates. Undefined at x == p.
inline Vec hyperbolic_distance_gradient(const Vec& x, const Vec& p) {
    double nx = norm_sq(x), np = norm_sq(p);
    double bx = 1.0 / std::sqrt(1.0 - nx), bp = 1.0 / std::sqrt(1.0 - np);
    double g = (1.0 - dot(x, p)) * bx * bp;  // |minkowski product|
    double den = std::sqrt(std::max(g * g - 1.0, 0.0));
    if (den == 0.0) throw std::invalid_argument("hyperbolic_distance_gradient: coincident points");
    // grad g = bp * (-p * bx + (1 - x.p) * x * bx^3)
    Vec grad(x.size());
    double bx3 = bx * bx * bx;
    for (std::size_t i = 0; i < x.size(); ++i)
        grad[i] = bp * (-p[i] * bx + (1.0 - dot(x, p)) * x[i] * bx3) / den;
    return grad;
}

}  // namespace qcp
