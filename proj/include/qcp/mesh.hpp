#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcp/applications.hpp"
#include "qcp/geometry.hpp"
#include "qcp/smooth.hpp"
#include "qcp/vec.hpp"

namespace qcp {

/// 2D triangular mesh. Triangles are index triples in counterclockwise
/// order with positive signed area; fixed vertices never move.
struct TriMesh {
    std::vector<Vec> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> fixed;

    void validate() const {
        if (fixed.size() != vertices.size())
            throw std::invalid_argument("TriMesh: fixed flags must match vertex count");
        for (const auto& t : triangles) {
            for (int i : t)
                if (i < 0 || static_cast<std::size_t>(i) >= vertices.size())
                    throw std::invalid_argument("TriMesh: triangle index out of range");
            const Vec& a = vertices[static_cast<std::size_t>(t[0])];
            const Vec& b = vertices[static_cast<std::size_t>(t[1])];
            const Vec& c = vertices[static_cast<std::size_t>(t[2])];
            if (signed_area(a, b, c) <= 0.0)
                throw std::invalid_argument("TriMesh: triangle with nonpositive area");
        }
    }

    static double signed_area(const Vec& a, const Vec& b, const Vec& c) {
        return 0.5 * cross2(sub(b, a), sub(c, a));
    }
};

/// Element quality measures; all are oriented so that smaller is better.
enum class QualityMeasure { max_angle, aspect_ratio, perimeter, circumradius, bank_smith };

namespace detail {

inline double angle_deg(const Vec& at, const Vec& p, const Vec& q) {
    Vec a = sub(p, at), b = sub(q, at);
    return std::atan2(std::abs(cross2(a, b)), dot(a, b)) * 180.0 / std::numbers::pi;
}

// Smallest enclosing ball radius of three points with the branch used:
// 0,1,2 -> diameter ball opposite vertex i; 3 -> circumball.
inline std::pair<double, int> triangle_circumradius(const Vec& a, const Vec& b, const Vec& c) {
    const Vec* v[3] = {&a, &b, &c};
    double best = kInfinity;
    int branch = -1;
    for (int i = 0; i < 3; ++i) {
        const Vec& p = *v[(i + 1) % 3];
        const Vec& q = *v[(i + 2) % 3];
        Vec mid = scaled(add(p, q), 0.5);
        double r = 0.5 * distance(p, q);
        if (distance(mid, *v[i]) <= r * (1.0 + 1e-12) && r < best) {
            best = r;
            branch = i;
        }
    }
    if (branch >= 0) return {best, branch};
    double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    double area = std::abs(TriMesh::signed_area(a, b, c));
    return {la * lb * lc / (4.0 * area), 3};
}

}  // namespace detail

/// Quality of the triangle abc under measure m (smaller is better;
/// bank_smith is negated so its optimum at the equilateral triangle is
/// -1). Degenerate triangles rate +inf.
inline double triangle_quality(QualityMeasure m, const Vec& a, const Vec& b, const Vec& c) {
    double area = std::abs(TriMesh::signed_area(a, b, c));
    double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    double scale = std::max({la, lb, lc});
    if (area <= 1e-14 * scale * scale) return kInfinity;
    switch (m) {
        case QualityMeasure::max_angle:
            return std::max({detail::angle_deg(a, b, c), detail::angle_deg(b, c, a),
                             detail::angle_deg(c, a, b)});
        case QualityMeasure::aspect_ratio:
            // side / corresponding altitude = side^2 / (2 area), per side.
            return std::max({la * la, lb * lb, lc * lc}) / (2.0 * area);
        case QualityMeasure::perimeter:
            return la + lb + lc;
        case QualityMeasure::circumradius:
            return detail::triangle_circumradius(a, b, c).first;
        case QualityMeasure::bank_smith:
            return -4.0 * std::sqrt(3.0) * area / (la * la + lb * lb + lc * lc);
    }
    throw std::logic_error("triangle_quality: unknown measure");
}

namespace detail {

// d(area)/dx for area = cross(a-x, b-x)/2 (signed, CCW positive when x
// sees a->b counterclockwise).
inline Vec signed_area_gradient_x(const Vec& a, const Vec& b) {
    return {0.5 * (a[1] - b[1]), 0.5 * (b[0] - a[0])};
}

// Gradient with respect to x of triangle_quality(m, x, a, b), following
// the branch that attains the max. Used as the solver surrogate (negated).
inline Vec triangle_quality_gradient(QualityMeasure m, const Vec& x, const Vec& a, const Vec& b) {
    double sa = TriMesh::signed_area(x, a, b);
    double area = std::abs(sa);
    Vec dA = signed_area_gradient_x(a, b);
    if (sa < 0) dA = scaled(dA, -1.0);
    switch (m) {
        case QualityMeasure::max_angle: {
            double ax = angle_deg(x, a, b), aa = angle_deg(a, b, x), ab = angle_deg(b, x, a);
            double deg = 180.0 / std::numbers::pi;
            if (ax >= aa && ax >= ab)
                return scaled(angle_at_v_gradient(a, b, x), deg);
            if (aa >= ab) {
                // angle at a between fixed (b - a) and varying (x - a)
                Vec g = angle_between_gradient_q(sub(b, a), sub(x, a));
                return scaled(g, deg);
            }
            Vec g = angle_between_gradient_q(sub(a, b), sub(x, b));
            return scaled(g, deg);
        }
        case QualityMeasure::aspect_ratio: {
            double lab = norm_sq(sub(a, b));
            double lxa = norm_sq(sub(x, a));
            double lxb = norm_sq(sub(x, b));
            double top = std::max({lab, lxa, lxb});
            if (top == lab) {
                // |ab|^2 / (2 area): only the area varies
                return scaled(dA, -lab / (2.0 * area * area));
            }
            const Vec& other = (top == lxa) ? a : b;
            Vec e = sub(x, other);
            Vec g = scaled(e, 1.0 / area);
            return axpy(g, -norm_sq(e) / (2.0 * area * area), dA);
        }
        case QualityMeasure::perimeter: {
            Vec ua = normalized(sub(x, a)), ub = normalized(sub(x, b));
            return add(ua, ub);
        }
        case QualityMeasure::circumradius: {
            auto [r, branch] = triangle_circumradius(x, a, b);
            if (branch == 0) return Vec{0.0, 0.0};  // ball spanned by a, b alone
            if (branch == 1 || branch == 2) {
                const Vec& other = (branch == 1) ? b : a;  // diameter pair {x, other}
                return scaled(normalized(sub(x, other)), 0.5);
            }
            // R = |x-a| |x-b| |a-b| / (4 area): logarithmic differentiation.
            Vec g = scaled(sub(x, a), 1.0 / norm_sq(sub(x, a)));
            g = add(g, scaled(sub(x, b), 1.0 / norm_sq(sub(x, b))));
            g = axpy(g, -1.0 / area, dA);
            return scaled(g, r);
        }
        case QualityMeasure::bank_smith: {
            double s = norm_sq(sub(x, a)) + norm_sq(sub(x, b)) + norm_sq(sub(a, b));
            Vec ds = add(scaled(sub(x, a), 2.0), scaled(sub(x, b), 2.0));
            double k = -4.0 * std::sqrt(3.0);
            // q = k area / s
            Vec g = scaled(dA, k / s);
            return axpy(g, -k * area / (s * s), ds);
        }
    }
    throw std::logic_error("triangle_quality_gradient: unknown measure");
}

// Star of a vertex: the link cycle (counterclockwise) plus, per incident
// triangle, the opposite edge (a, b) oriented so that (v, a, b) is CCW.
struct VertexStar {
    std::vector<Vec> link;                       // cycle of link vertex positions
    std::vector<std::pair<Vec, Vec>> opposite;   // per incident triangle
    std::vector<std::size_t> triangle_ids;
};

inline std::optional<VertexStar> build_star(const TriMesh& mesh, int v) {
    std::map<int, int> next;  // a -> b along CCW opposite edges
    VertexStar star;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        int pos = -1;
        for (int i = 0; i < 3; ++i)
            if (tri[static_cast<std::size_t>(i)] == v) pos = i;
        if (pos < 0) continue;
        int a = tri[static_cast<std::size_t>((pos + 1) % 3)];
        int b = tri[static_cast<std::size_t>((pos + 2) % 3)];
        if (next.count(a)) return std::nullopt;  // non-manifold star
        next[a] = b;
        star.opposite.emplace_back(mesh.vertices[static_cast<std::size_t>(a)],
                                   mesh.vertices[static_cast<std::size_t>(b)]);
        star.triangle_ids.push_back(t);
    }
    if (next.empty()) return std::nullopt;
    // Chain the opposite edges into a single closed cycle.
    int start = next.begin()->first;
    int cur = start;
    for (std::size_t steps = 0; steps < next.size(); ++steps) {
        star.link.push_back(mesh.vertices[static_cast<std::size_t>(cur)]);
        auto it = next.find(cur);
        if (it == next.end()) return std::nullopt;  // open fan: boundary vertex
        cur = it->second;
    }
    if (cur != start) return std::nullopt;
    return star;
}

}  // namespace detail

/// Optimal placement for one mesh vertex: minimize the worst quality of
/// its incident triangles over the kernel of its star polygon, one
/// quasiconvex objective per triangle with the kernel halfplanes as
/// constant constraint families. Returns nullopt (skip) when the star is
/// open or its kernel is empty.
inline std::optional<Vec> relocate_vertex(const TriMesh& mesh, int v, QualityMeasure m,
                                          const SolverConfig& config = {}) {
    if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size())
        throw std::invalid_argument("relocate_vertex: vertex index out of range");
    if (mesh.fixed[static_cast<std::size_t>(v)])
        throw std::invalid_argument("relocate_vertex: vertex is fixed");
    auto star = detail::build_star(mesh, v);
    if (!star) return std::nullopt;

    ConvexPolygon kernel;
    try {
        kernel = polygon_kernel(star->link);
    } catch (const std::invalid_argument&) {
        return std::nullopt;  // empty kernel: skip
    }

    QcpProblem prob;
    prob.dimension = 2;
    for (const auto& [a, b] : star->opposite) {
        QuasiconvexFunction q;
        q.dimension = 2;
        q.eval = [m, a, b](const Vec& x) { return triangle_quality(m, x, a, b); };
        q.surrogate = [m, a, b](const Vec& x) {
            return scaled(detail::triangle_quality_gradient(m, x, a, b), -1.0);
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
    prob.bounding_box = detail::bounding_box_of(kernel.vertices, 1e-9);

    const Vec& current = mesh.vertices[static_cast<std::size_t>(v)];
    double before = pointwise_max(prob.objectives, current);
    Vec x0 = current;
    if (!detail::point_feasible(prob, x0, before) || !std::isfinite(before))
        x0 = kernel.centroid();

    auto [value, trace] = minimize(prob, x0, config);
    double after = pointwise_max(prob.objectives, value.point);
    if (!(after <= before) || !kernel.contains(value.point)) return current;
    return value.point;
}

/// Sweep the non-fixed vertices in ascending index order, `passes` times,
/// relocating each one; worst quality over the whole mesh never increases.
/// When given, `worst_trace` receives the global worst quality after every
/// relocation.
inline TriMesh smooth_mesh(const TriMesh& mesh, QualityMeasure m, int passes,
                           const SolverConfig& config = {},
                           std::vector<double>* worst_trace = nullptr) {
    mesh.validate();
    TriMesh out = mesh;
    auto global_worst = [&]() {
        double w = -kInfinity;
        for (const auto& t : out.triangles)
            w = std::max(w, triangle_quality(m, out.vertices[static_cast<std::size_t>(t[0])],
                                             out.vertices[static_cast<std::size_t>(t[1])],
                                             out.vertices[static_cast<std::size_t>(t[2])]));
        return w;
    };
    for (int pass = 0; pass < passes; ++pass) {
        for (std::size_t v = 0; v < out.vertices.size(); ++v) {
            if (out.fixed[v]) continue;
            auto pos = relocate_vertex(out, static_cast<int>(v), m, config);
            if (pos) out.vertices[v] = *pos;
            if (worst_trace) worst_trace->push_back(global_worst());
        }
    }
    return out;
}

}  // namespace qcp
