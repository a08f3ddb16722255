#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "qcp/geometry.hpp"

using namespace qcp;

namespace {

// O(n^3) candidate-vertex oracle: intersect every pair of boundary lines,
// keep feasible points, and report them as an (unordered) vertex set.
std::vector<Vec> halfplane_brute(const std::vector<Halfspace>& hs, const Box& box) {
    std::vector<Halfspace> all = hs;
    all.push_back({{1.0, 0.0}, box.lo[0]});
    all.push_back({{-1.0, 0.0}, -box.hi[0]});
    all.push_back({{0.0, 1.0}, box.lo[1]});
    all.push_back({{0.0, -1.0}, -box.hi[1]});
    std::vector<Vec> verts;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            double det = cross2(all[i].normal, all[j].normal);
            if (std::abs(det) < 1e-12) continue;
            double x = (all[i].offset * all[j].normal[1] - all[j].offset * all[i].normal[1]) / det;
            double y = (all[i].normal[0] * all[j].offset - all[j].normal[0] * all[i].offset) / det;
            Vec p{x, y};
            bool ok = true;
            for (const auto& h : all)
                if (dot(h.normal, p) < h.offset - 1e-7 * (1.0 + std::abs(h.offset))) ok = false;
            if (!ok) continue;
            bool dup = false;
            for (const Vec& q : verts)
                if (distance(p, q) < 1e-6) dup = true;
            if (!dup) verts.push_back(p);
        }
    return verts;
}

bool same_vertex_set(const std::vector<Vec>& a, const std::vector<Vec>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (const Vec& p : a) {
        bool found = false;
        for (const Vec& q : b)
            if (distance(p, q) < tol) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("halfplane_intersection clips the box to the expected polygon") {
    Box box({-2.0, -2.0}, {2.0, 2.0});
    std::vector<Halfspace> hs{{{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}, {{-1.0, -1.0}, -1.0}};
    auto poly = halfplane_intersection(hs, box);
    REQUIRE(poly);
    CHECK(same_vertex_set(poly->vertices, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, 1e-9));
    CHECK(poly->area() == Catch::Approx(0.5).margin(1e-12));

    std::vector<Halfspace> empty{{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 0.0}};
    CHECK_FALSE(halfplane_intersection(empty, box));
}

TEST_CASE("halfplane_intersection matches the candidate-vertex oracle") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    Box box({-3.0, -3.0}, {3.0, 3.0});
    int nonempty = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Halfspace> hs;
        for (int i = 0; i < 8; ++i) {
            Vec n{coord(rng), coord(rng)};
            if (norm(n) < 1e-2) n[0] += 1.0;
            hs.push_back({n, coord(rng) - 0.5});  // biased toward feasibility
        }
        auto poly = halfplane_intersection(hs, box);
        auto brute = halfplane_brute(hs, box);
        // Hull area of the oracle's candidate vertices (angular sort).
        double brute_area = 0.0;
        if (brute.size() >= 3) {
            Vec c{0.0, 0.0};
            for (const Vec& p : brute) c = add(c, p);
            c = scaled(c, 1.0 / static_cast<double>(brute.size()));
            std::sort(brute.begin(), brute.end(), [&](const Vec& a, const Vec& b) {
                return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
            });
            brute_area = std::abs(ConvexPolygon{brute}.area());
        }
        if (!poly) {
            // The oracle may retain a degenerate (zero-area) sliver.
            CHECK(brute_area < 1e-5);
            continue;
        }
        ++nonempty;
        CHECK(std::abs(poly->area() - brute_area) < 1e-5 * std::max(1.0, brute_area));
        for (const Vec& bv : brute) CHECK(poly->contains(bv, 1e-5));
        for (const Vec& pv : poly->vertices) {
            CHECK(box.contains(pv, 1e-7));
            for (const auto& h : hs)
                CHECK(dot(h.normal, pv) >= h.offset - 1e-7 * (1.0 + std::abs(h.offset)));
        }
    }
    CHECK(nonempty > 40);
}

TEST_CASE("polygon_kernel of a convex polygon is the polygon") {
    std::vector<Vec> square{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};
    auto k = polygon_kernel(square);
    CHECK(same_vertex_set(k.vertices, square, 1e-8));
}

TEST_CASE("polygon_kernel of the arrowhead is a proper subregion") {
    std::vector<Vec> arrow{{0.0, 0.0}, {4.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}};
    auto k = polygon_kernel(arrow);
    // Cross-check against the candidate-vertex oracle on the four inner
    // halfplanes: the kernel sits right of the notch, between the lines
    // x >= y and x + y >= 2.
    std::vector<Halfspace> inner{{{-1.0, 4.0}, 0.0},
                                 {{-1.0, -4.0}, -8.0},
                                 {{1.0, 1.0}, 2.0},
                                 {{1.0, -1.0}, 0.0}};
    auto brute = halfplane_brute(inner, Box({-1.0, -1.0}, {5.0, 3.0}));
    CHECK(same_vertex_set(k.vertices, brute, 1e-6));
    CHECK(k.contains({1.5, 0.9}));
    CHECK_FALSE(k.contains({0.5, 1.0}));  // outside the polygon entirely
    CHECK(k.area() > 0.0);
    CHECK(k.area() < std::abs(ConvexPolygon{arrow}.area()));
    // Interior kernel points must see every polygon vertex.
    auto sees = [&](const Vec& from, const Vec& to) {
        std::size_t n = arrow.size();
        for (std::size_t e = 0; e < n; ++e) {
            const Vec& a = arrow[e];
            const Vec& b = arrow[(e + 1) % n];
            if (detail::segments_properly_intersect(from, to, a, b)) return false;
        }
        return true;
    };
    Vec inside = k.centroid();
    for (const Vec& kv : k.vertices) {
        Vec probe = axpy(kv, 1e-6, sub(inside, kv));
        for (const Vec& pv : arrow) CHECK(sees(probe, pv));
    }
    for (const Vec& pv : arrow) CHECK(sees(inside, pv));
}

TEST_CASE("non-star polygon is rejected") {
    // Two-toothed comb: no point sees into both slots.
    std::vector<Vec> comb{{0.0, 0.0}, {5.0, 0.0}, {5.0, 3.0}, {4.0, 3.0}, {4.0, 1.0},
                          {3.0, 1.0}, {3.0, 3.0}, {2.0, 3.0}, {2.0, 1.0}, {1.0, 1.0},
                          {1.0, 3.0}, {0.0, 3.0}};
    CHECK_THROWS_AS(polygon_kernel(comb), std::invalid_argument);
    CHECK_THROWS_AS(StarPolygon(comb), std::invalid_argument);
    CHECK_THROWS_AS(StarPolygon({{0.0, 0.0}, {1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("complementary_angle examples") {
    Vec u{-1.0, 0.0}, w{1.0, 0.0};
    CHECK_THAT(complementary_angle(u, w, {0.0, 1.0}), Catch::Matchers::WithinAbs(90.0, 1e-12));
    CHECK(complementary_angle(u, w, {0.0, 1e6}) > 179.99);
    CHECK_THAT(complementary_angle(u, w, {0.0, 1.0 / std::sqrt(3.0)}),
               Catch::Matchers::WithinAbs(60.0, 1e-9));
    CHECK_THROWS_AS(complementary_angle(u, w, u), std::invalid_argument);
}

TEST_CASE("complementary_angle level sets are convex in the upper halfplane") {
    Vec u{-1.0, 0.0}, w{1.0, 0.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cx(-3.0, 3.0), cy(0.01, 3.0), frac(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        Vec a{cx(rng), cy(rng)}, b{cx(rng), cy(rng)};
        double p = frac(rng);
        Vec mid = axpy(scaled(a, p), 1.0 - p, b);
        double bound = std::max(complementary_angle(u, w, a), complementary_angle(u, w, b));
        CHECK(complementary_angle(u, w, mid) <= bound + 1e-9);
    }
}

TEST_CASE("angle gradients match central finite differences") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        Vec u{coord(rng), coord(rng)}, w{coord(rng), coord(rng)}, v{coord(rng), coord(rng)};
        if (distance(u, v) < 0.2 || distance(w, v) < 0.2 || distance(u, w) < 0.2) continue;
        auto angle = [&](const Vec& q) {
            Vec a = sub(u, q), b = sub(w, q);
            return std::atan2(std::abs(cross2(a, b)), dot(a, b));
        };
        Vec g = angle_at_v_gradient(u, w, v);
        for (int j = 0; j < 2; ++j) {
            Vec vp = v, vm = v;
            vp[j] += h;
            vm[j] -= h;
            double fd = (angle(vp) - angle(vm)) / (2.0 * h);
            CHECK_THAT(g[j], Catch::Matchers::WithinAbs(fd, 1e-4 * (1.0 + std::abs(fd))));
        }
        Vec p = sub(u, v);  // fixed leg; vary the second leg q
        Vec q0 = sub(w, v);
        Vec gq = angle_between_gradient_q(p, q0);
        auto angle2 = [&](const Vec& q) { return std::atan2(std::abs(cross2(p, q)), dot(p, q)); };
        for (int j = 0; j < 2; ++j) {
            Vec qp = q0, qm = q0;
            qp[j] += h;
            qm[j] -= h;
            double fd = (angle2(qp) - angle2(qm)) / (2.0 * h);
            CHECK_THAT(gq[j], Catch::Matchers::WithinAbs(fd, 1e-4 * (1.0 + std::abs(fd))));
        }
    }
}

TEST_CASE("hyperbolic distance: radial closed form and metric properties") {
    CHECK(hyperbolic_distance(Vec{0.3, 0.4}, Vec{0.3, 0.4}) == 0.0);
    CHECK_THAT(hyperbolic_distance(Vec{0.0, 0.0}, Vec{0.5, 0.0}),
               Catch::Matchers::WithinAbs(std::atanh(0.5), 1e-12));
    for (double r : {0.1, 0.35, 0.77, 0.99}) {
        CHECK_THAT(hyperbolic_distance(Vec{0.0, 0.0}, Vec{r, 0.0}),
                   Catch::Matchers::WithinAbs(0.5 * std::log((1.0 + r) / (1.0 - r)), 1e-10));
    }
    CHECK_THROWS_AS(hyperbolic_distance(Vec{1.0, 0.0}, Vec{0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(KleinPoint(Vec{0.7, 0.8}), std::invalid_argument);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-0.7, 0.7);
    for (int i = 0; i < 1000; ++i) {
        Vec a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)}, c{coord(rng), coord(rng)};
        double ab = hyperbolic_distance(a, b);
        double bc = hyperbolic_distance(b, c);
        double ac = hyperbolic_distance(a, c);
        CHECK(ac <= ab + bc + 1e-12);
        CHECK_THAT(ab, Catch::Matchers::WithinAbs(hyperbolic_distance(b, a), 1e-13));
    }
}

TEST_CASE("hyperbolic balls are convex in Klein coordinates") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coord(-0.8, 0.8), frac(0.0, 1.0);
    auto sample_disk = [&]() {
        while (true) {
            Vec p{coord(rng), coord(rng)};
            if (norm(p) < 0.85) return p;
        }
    };
    Vec site{0.25, -0.1};
    for (int i = 0; i < 2000; ++i) {
        Vec a = sample_disk(), b = sample_disk();
        double p = frac(rng);
        Vec mid = axpy(scaled(a, p), 1.0 - p, b);
        double bound =
            std::max(hyperbolic_distance(a, site), hyperbolic_distance(b, site));
        CHECK(hyperbolic_distance(mid, site) <= bound + 1e-10);
    }
}

TEST_CASE("hyperbolic distance gradient matches finite differences") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-0.6, 0.6);
    const double h = 1e-6;
    int tested = 0;
    while (tested < 100) {
        Vec x{coord(rng), coord(rng)}, p{coord(rng), coord(rng)};
        if (distance(x, p) < 0.1) continue;
        ++tested;
        Vec g = hyperbolic_distance_gradient(x, p);
        for (int j = 0; j < 2; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            double fd = (hyperbolic_distance(xp, p) - hyperbolic_distance(xm, p)) / (2.0 * h);
            CHECK_THAT(g[j], Catch::Matchers::WithinRel(fd, 1e-4));
        }
    }
}
