#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcp/core.hpp"
#include "qcp/geometry.hpp"
#include "qcp/lp.hpp"
#include "qcp/smooth.hpp"
#include "qcp/vec.hpp"

namespace qcp {

/// Ball with center p and radius r; as an objective it contributes
/// q(x) = d(x, p) + r, whose level sets are concentric balls.
struct Ball {
    Vec center;
    double radius = 0.0;
};

/// One face/vertex pair of a room polyhedron: inward unit face normal and
/// a vertex of that face.
struct RoomFacePair {
    Vec face_normal;  // unit length, pointing into the room
    Vec vertex;
};

/// Convex set with an associated value, for the generalized longest
/// intersecting prefix problem.
struct ValuedConvexSet {
    std::vector<Halfspace> set;
    double value = 0.0;
};

namespace detail {

inline QuasiconvexFunction distance_objective(const Vec& site, double radius_offset = 0.0) {
    QuasiconvexFunction q;
    q.dimension = site.size();
    q.eval = [site, radius_offset](const Vec& x) { return distance(x, site) + radius_offset; };
    q.surrogate = [site](const Vec& x) {
        double r = distance(x, site);
        if (r == 0.0) return Vec(site.size(), 0.0);  // at the minimum
        return scaled(sub(site, x), 1.0 / r);
    };
    q.minimum_hint = site;
    return q;
}

inline NestedConvexFamily halfplane_family(const Halfspace& h, std::size_t dim) {
    NestedConvexFamily fam;
    fam.dimension = dim;
    fam.kind = FamilyKind::constant;
    double scale = norm(h.normal);
    fam.contains = [h, scale](double, const Vec& x) {
        return dot(h.normal, x) >= h.offset - 1e-12 * std::max(1.0, scale);
    };
    fam.active_normal = [h, scale](const Vec& x) -> std::optional<Vec> {
        double slack = dot(h.normal, x) - h.offset;
        if (std::abs(slack) > 1e-9 * std::max(1.0, scale) * std::max(1.0, norm(x)))
            return std::nullopt;
        return scaled(h.normal, 1.0 / scale);
    };
    return fam;
}

inline Vec centroid_of(const std::vector<Vec>& pts) {
    Vec c(pts[0].size(), 0.0);
    for (const Vec& p : pts) c = add(c, p);
    return scaled(c, 1.0 / static_cast<double>(pts.size()));
}

inline Box bounding_box_of(const std::vector<Vec>& pts, double pad) {
    std::size_t d = pts[0].size();
    Vec lo(d, kInfinity), hi(d, -kInfinity);
    for (const Vec& p : pts)
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], p[j]);
            hi[j] = std::max(hi[j], p[j]);
        }
    for (std::size_t j = 0; j < d; ++j) {
        lo[j] -= pad;
        hi[j] += pad;
    }
    return Box(lo, hi);
}

}  // namespace detail

/// Result of the sighting point problem: the viewpoint maximizing the
/// angular resolution of a star-shaped polygon, and that resolution.
struct SightingResult {
    double resolution = 0.0;  // degrees
    Vec viewpoint;
    SolveTrace trace;
};

/// Maximize over the kernel the minimum angle subtended by any polygon
/// edge: minimize the pointwise max of the complementary angles.
inline SightingResult sighting_point(const StarPolygon& p, const SolverConfig& config = {}) {
    std::size_t n = p.vertices.size();
    ConvexPolygon kernel = polygon_kernel(p);

    QcpProblem prob;
    prob.dimension = 2;
    for (std::size_t i = 0; i < n; ++i) {
        Vec u = p.vertices[i], w = p.vertices[(i + 1) % n];
        QuasiconvexFunction q;
        q.dimension = 2;
        q.eval = [u, w](const Vec& v) { return complementary_angle(u, w, v); };
        q.surrogate = [u, w](const Vec& v) {
            // q = 180 - theta(v) in degrees; surrogate = -grad q.
            Vec g = angle_at_v_gradient(u, w, v);
            return scaled(g, 180.0 / std::numbers::pi);
        };
        prob.objectives.push_back(std::move(q));
    }
    for (std::size_t i = 0; i < kernel.vertices.size(); ++i) {
        const Vec& a = kernel.vertices[i];
        const Vec& b = kernel.vertices[(i + 1) % kernel.vertices.size()];
        Vec e = sub(b, a);
        Vec normal{-e[1], e[0]};
        prob.constraints.push_back(detail::halfplane_family({normal, dot(normal, a)}, 2));
    }
    prob.bounding_box = detail::bounding_box_of(p.vertices, 1e-6);

    Vec x0 = kernel.centroid();
    auto [value, trace] = minimize(prob, x0, config);
    return SightingResult{180.0 - value.level, value.point, std::move(trace)};
}

/// Smallest ball containing every input ball, solved as a quasiconvex
/// program over the objectives d(x, p_i) + r_i.
inline Ball seb_of_balls(const std::vector<Ball>& balls, const SolverConfig& config = {}) {
    if (balls.empty()) throw std::invalid_argument("seb_of_balls: empty input");
    std::size_t d = balls[0].center.size();
    if (d != 2 && d != 3) throw std::invalid_argument("seb_of_balls: dimension must be 2 or 3");
    if (balls.size() == 1) return balls[0];

    std::vector<Vec> centers;
    double max_r = 0.0;
    for (const Ball& b : balls) {
        centers.push_back(b.center);
        max_r = std::max(max_r, b.radius);
    }
    QcpProblem prob;
    prob.dimension = d;
    for (const Ball& b : balls)
        prob.objectives.push_back(detail::distance_objective(b.center, b.radius));
    Box bbox = detail::bounding_box_of(centers, max_r + 1.0);
    prob.bounding_box = bbox;

    auto [value, trace] = minimize(prob, detail::centroid_of(centers), config);
    return Ball{value.point, value.level};
}

/// Smallest hyperbolic ball enclosing the given Klein-model points: the
/// hyperbolic distances become Euclidean quasiconvex functions in Klein
/// coordinates, so the Euclidean machinery applies unchanged.
struct HyperbolicSeb {
    KleinPoint center;
    double radius = 0.0;
};

namespace detail {

// Hyperbolic circumcenter of 2 or 3 Klein points via the hyperboloid
// model: the center is Minkowski-orthogonal to the lifted differences
// (pair: proportional to the lifted sum). Returns nullopt when the
// equidistant locus leaves the hyperboloid.
inline std::optional<Vec> hyperbolic_circumcenter(const std::vector<Vec>& pts) {
    auto lft = [](const Vec& k) {
        double f = 1.0 / std::sqrt(1.0 - norm_sq(k));
        Vec out = scaled(k, f);
        out.push_back(f);
        return out;
    };
    std::size_t d = pts[0].size();
    Vec c;
    if (pts.size() == 2) {
        c = add(lft(pts[0]), lft(pts[1]));
    } else if (pts.size() == 3 && d == 2) {
        Vec a = sub(lft(pts[0]), lft(pts[1]));
        Vec b = sub(lft(pts[0]), lft(pts[2]));
        Vec ma{a[0], a[1], -a[2]}, mb{b[0], b[1], -b[2]};
        c = {ma[1] * mb[2] - ma[2] * mb[1], ma[2] * mb[0] - ma[0] * mb[2],
             ma[0] * mb[1] - ma[1] * mb[0]};
    } else {
        return std::nullopt;
    }
    double s = -c.back() * c.back();
    for (std::size_t i = 0; i + 1 < c.size(); ++i) s += c[i] * c[i];
    if (s >= -1e-12) return std::nullopt;
    if (c.back() < 0) c = scaled(c, -1.0);
    Vec klein(c.begin(), c.end() - 1);
    return scaled(klein, 1.0 / c.back());
}

}  // namespace detail

inline HyperbolicSeb hyperbolic_seb(const std::vector<KleinPoint>& points,
                                    const SolverConfig& config = {}) {
    if (points.empty()) throw std::invalid_argument("hyperbolic_seb: empty input");
    std::size_t d = points[0].coords.size();
    if (points.size() == 1) return HyperbolicSeb{points[0], 0.0};

    QcpProblem prob;
    prob.dimension = d;
    std::vector<Vec> coords;
    for (const KleinPoint& p : points) {
        coords.push_back(p.coords);
        Vec site = p.coords;
        QuasiconvexFunction q;
        q.dimension = d;
        q.eval = [site](const Vec& x) {
            if (norm(x) >= 1.0 - 1e-12) return kInfinity;
            return hyperbolic_distance(x, site);
        };
        q.surrogate = [site](const Vec& x) {
            if (distance(x, site) < 1e-15) return Vec(x.size(), 0.0);  // at the minimum
            return scaled(hyperbolic_distance_gradient(x, site), -1.0);
        };
        q.minimum_hint = site;
        prob.objectives.push_back(std::move(q));
    }
    prob.bounding_box = Box(Vec(d, -1.0), Vec(d, 1.0));

    auto [value, trace] = minimize(prob, detail::centroid_of(coords), config);
    Vec center = value.point;
    double radius = value.level;
    auto worst_of = [&](const Vec& c) {
        double w = 0.0;
        for (const Vec& p : coords) w = std::max(w, hyperbolic_distance(c, p));
        return w;
    };
    // Polish: snap the center to the exact circumcenter of the support
    // set identified by the descent, when that does not worsen the cover.
    if (!trace.iterations.empty()) {
        const auto& active = trace.iterations.back().active;
        if (active.size() >= 2 && active.size() <= 3) {
            std::vector<Vec> support;
            for (int i : active) support.push_back(coords[static_cast<std::size_t>(i)]);
            auto cc = detail::hyperbolic_circumcenter(support);
            if (cc && norm(*cc) < 1.0 - 1e-12) {
                double w = worst_of(*cc);
                if (w <= radius + config.tolerance) {
                    center = *cc;
                    radius = std::min(radius, w);
                }
            }
        }
    }
    return HyperbolicSeb{KleinPoint(center), worst_of(center)};
}

/// Point light source placement maximizing the minimum illumination over
/// the face/vertex pairs of a room. Intensity at a pair follows the
/// inverse-square law with the cosine of the angle of incidence:
/// u . (x - v) / d(x, v)^3.
struct IlluminationResult {
    double intensity = 0.0;
    Vec source;
    SolveTrace trace;
};

inline IlluminationResult optimal_illumination(const std::vector<RoomFacePair>& pairs,
                                               const Box& box, const SolverConfig& config = {}) {
    if (pairs.empty()) throw std::invalid_argument("optimal_illumination: empty input");
    QcpProblem prob;
    prob.dimension = 3;
    for (const RoomFacePair& pr : pairs) {
        Vec u = pr.face_normal, v = pr.vertex;
        QuasiconvexFunction q;
        q.dimension = 3;
        q.eval = [u, v](const Vec& x) {
            Vec w = sub(x, v);
            double r = norm(w);
            if (r < 1e-12) return kInfinity;
            return -dot(u, w) / (r * r * r);
        };
        q.surrogate = [u, v](const Vec& x) {
            // q = -(u.w) r^-3, grad q = -u r^-3 + 3 (u.w) r^-5 w.
            Vec w = sub(x, v);
            double r = norm(w);
            double r3 = r * r * r, r5 = r3 * r * r;
            double uw = dot(u, w);
            Vec g(3);
            for (int j = 0; j < 3; ++j) g[j] = -u[j] / r3 + 3.0 * uw * w[j] / r5;
            return scaled(g, -1.0);
        };
        prob.objectives.push_back(std::move(q));
    }
    prob.bounding_box = box;

    Vec x0 = box.center();
    if (!std::isfinite(pointwise_max(prob.objectives, x0))) {
        // Center coincides with a vertex; nudge deterministically.
        for (std::size_t j = 0; j < 3; ++j)
            x0[j] += 1e-6 * (box.hi[j] - box.lo[j]) * (j + 1);
    }
    auto [value, trace] = minimize(prob, x0, config);
    return IlluminationResult{-value.level, value.point, std::move(trace)};
}

/// Result of a longest intersecting prefix query.
struct LipResult {
    int length = 0;
    std::optional<Vec> witness;
};

namespace detail {

inline std::optional<Vec> prefix_feasible_point(const std::vector<std::vector<Halfspace>>& sets,
                                                std::size_t count, const Box& box) {
    std::vector<Halfspace> all;
    for (std::size_t i = 0; i < count; ++i)
        all.insert(all.end(), sets[i].begin(), sets[i].end());
    auto sol = seidel_lp(all, Vec(box.dim(), 0.0), box);
    if (!sol) return std::nullopt;
    return sol->point;
}

}  // namespace detail

/// Longest prefix of the ordered convex sets with a nonempty common
/// intersection (within the box), by binary search on the prefix length
/// with an LP feasibility test; emptiness is monotone in the length.
inline LipResult longest_intersecting_prefix(const std::vector<std::vector<Halfspace>>& sets,
                                             const Box& box) {
    if (sets.empty()) throw std::invalid_argument("longest_intersecting_prefix: empty sequence");
    std::size_t lo = 1, hi = sets.size();
    if (!detail::prefix_feasible_point(sets, 1, box))
        return LipResult{0, std::nullopt};  // excluded by precondition, handled defensively
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        if (detail::prefix_feasible_point(sets, mid, box))
            lo = mid;
        else
            hi = mid - 1;
    }
    auto witness = detail::prefix_feasible_point(sets, lo, box);
    return LipResult{static_cast<int>(lo), witness};
}

/// Generalized longest intersecting prefix: the supremum threshold l such
/// that all sets with value < l intersect. Unbounded (every set meets)
/// is reported with threshold = +inf.
struct ValuedLipResult {
    double threshold = 0.0;
    std::optional<Vec> witness;
};

inline ValuedLipResult longest_valued_intersection(const std::vector<ValuedConvexSet>& sets,
                                                   const Box& box) {
    if (sets.empty()) throw std::invalid_argument("longest_valued_intersection: empty input");
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sets[a].value < sets[b].value; });

    std::vector<Halfspace> pool;
    auto feasible_point = [&]() -> std::optional<Vec> {
        auto sol = seidel_lp(pool, Vec(box.dim(), 0.0), box);
        if (!sol) return std::nullopt;
        return sol->point;
    };
    std::optional<Vec> witness = feasible_point();  // box point when no set has joined yet
    std::size_t i = 0;
    while (i < order.size()) {
        double v = sets[order[i]].value;
        std::size_t j = i;
        while (j < order.size() && sets[order[j]].value == v) {
            const auto& hs = sets[order[j]].set;
            pool.insert(pool.end(), hs.begin(), hs.end());
            ++j;
        }
        auto pt = feasible_point();
        if (!pt) return ValuedLipResult{v, witness};
        witness = pt;
        i = j;
    }
    return ValuedLipResult{kInfinity, witness};
}

}  // namespace qcp
