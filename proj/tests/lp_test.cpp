#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "oracles.hpp"
#include "qcp/lp.hpp"

using namespace qcp;

TEST_CASE("seidel_lp finds corner optima and reports infeasibility") {
    Box box({-10.0, -10.0}, {10.0, 10.0});
    std::vector<Halfspace> nonneg{{{1.0, 0.0}, 0.0}, {{0.0, 1.0}, 0.0}};
    auto sol = seidel_lp(nonneg, {1.0, 1.0}, box, 42);
    REQUIRE(sol);
    CHECK_THAT(sol->level, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(sol->point[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(sol->point[1], Catch::Matchers::WithinAbs(0.0, 1e-12));

    std::vector<Halfspace> contradictory{{{1.0, 0.0}, 1.0}, {{-1.0, 0.0}, 0.0}};
    CHECK_FALSE(seidel_lp(contradictory, {1.0, 0.0}, box, 0));
    CHECK_FALSE(seidel_lp(contradictory, {0.0, 0.0}, box, 0));
}

TEST_CASE("seidel_lp 3D example matches vertex enumeration") {
    Box box(Vec(3, -10.0), Vec(3, 10.0));
    std::vector<Halfspace> cons{{{1.0, 1.0, 1.0}, 3.0},
                                {{1.0, 0.0, 0.0}, 0.0},
                                {{0.0, 1.0, 0.0}, 0.0},
                                {{0.0, 0.0, 1.0}, 0.0}};
    Vec c{1.0, 2.0, 3.0};
    auto sol = seidel_lp(cons, c, box, 5);
    REQUIRE(sol);
    auto ref = oracle::lp_vertex_enum(cons, c, box);
    REQUIRE(ref.feasible);
    CHECK_THAT(sol->level, Catch::Matchers::WithinAbs(3.0, 1e-9));
    CHECK_THAT(sol->point[0], Catch::Matchers::WithinAbs(3.0, 1e-9));
    CHECK_THAT(sol->point[1], Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(sol->point[2], Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(sol->level, Catch::Matchers::WithinAbs(ref.value, 1e-9));
}

TEST_CASE("seidel_lp ties resolve to the lexicographically least point") {
    Box box({-5.0, -5.0}, {5.0, 5.0});
    // Objective constant along x+y >= 1: the optimal face is a segment.
    std::vector<Halfspace> cons{{{1.0, 1.0}, 1.0}};
    auto sol = seidel_lp(cons, {1.0, 1.0}, box, 3);
    REQUIRE(sol);
    CHECK_THAT(sol->level, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK_THAT(sol->point[0], Catch::Matchers::WithinAbs(-4.0, 1e-9));
    CHECK_THAT(sol->point[1], Catch::Matchers::WithinAbs(5.0, 1e-9));

    // Pure feasibility: the lexicographically least feasible point.
    auto feas = seidel_lp(cons, {0.0, 0.0}, box, 3);
    REQUIRE(feas);
    CHECK_THAT(feas->point[0], Catch::Matchers::WithinAbs(-4.0, 1e-9));
    CHECK_THAT(feas->point[1], Catch::Matchers::WithinAbs(5.0, 1e-9));
}

TEST_CASE("seidel_lp agrees with vertex enumeration on random instances") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_int_distribution<int> ncons(1, 8);
    for (int dim = 2; dim <= 3; ++dim) {
        Box box(Vec(dim, -4.0), Vec(dim, 4.0));
        int feasible_seen = 0;
        for (int trial = 0; trial < 120; ++trial) {
            std::vector<Halfspace> cons;
            int n = ncons(rng);
            for (int i = 0; i < n; ++i) {
                Vec a(dim);
                for (double& v : a) v = coord(rng);
                if (norm(a) < 1e-3) a[0] += 1.0;
                cons.push_back({a, coord(rng)});
            }
            Vec c(dim);
            for (double& v : c) v = coord(rng);
            auto ref = oracle::lp_vertex_enum(cons, c, box);
            auto sol = seidel_lp(cons, c, box, static_cast<std::uint64_t>(trial));
            if (!ref.feasible) {
                CHECK_FALSE(sol);
                continue;
            }
            ++feasible_seen;
            REQUIRE(sol);
            CHECK_THAT(sol->level, Catch::Matchers::WithinAbs(ref.value, 1e-6));
            for (int j = 0; j < dim; ++j)
                CHECK_THAT(sol->point[j], Catch::Matchers::WithinAbs(ref.point[j], 1e-6));
        }
        CHECK(feasible_seen > 30);
    }
}

TEST_CASE("seidel_lp is deterministic across seeds") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    Box box({-4.0, -4.0}, {4.0, 4.0});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Halfspace> cons;
        for (int i = 0; i < 6; ++i) {
            Vec a{coord(rng), coord(rng)};
            if (norm(a) < 1e-3) a[0] += 1.0;
            cons.push_back({a, coord(rng)});
        }
        Vec c{coord(rng), coord(rng)};
        auto a = seidel_lp(cons, c, box, 1);
        auto b = seidel_lp(cons, c, box, 77777);
        REQUIRE(static_cast<bool>(a) == static_cast<bool>(b));
        if (a) {
            CHECK_THAT(a->level, Catch::Matchers::WithinAbs(b->level, 1e-9));
            CHECK_THAT(a->point[0], Catch::Matchers::WithinAbs(b->point[0], 1e-9));
            CHECK_THAT(a->point[1], Catch::Matchers::WithinAbs(b->point[1], 1e-9));
        }
    }
}

TEST_CASE("seidel_lp rejects unsupported dimensions") {
    Box box(Vec(17, -1.0), Vec(17, 1.0));
    CHECK_THROWS_AS(seidel_lp({}, Vec(17, 0.0), box, 0), std::invalid_argument);
}

TEST_CASE("seb_basis solves tiny instances exactly") {
    auto single = seb_basis({{0.0, 0.0}});
    CHECK(single.radius == 0.0);
    CHECK(single.support == std::vector<int>{0});

    auto pair = seb_basis({{0.0, 0.0}, {2.0, 0.0}});
    CHECK_THAT(pair.radius, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(pair.center[0], Catch::Matchers::WithinAbs(1.0, 1e-12));

    auto tri = seb_basis({{0.0, 0.0}, {4.0, 0.0}, {0.0, 3.0}});
    CHECK_THAT(tri.radius, Catch::Matchers::WithinAbs(2.5, 1e-12));
    CHECK_THAT(tri.center[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(tri.center[1], Catch::Matchers::WithinAbs(1.5, 1e-12));

    CHECK_THROWS_AS(seb_basis({}), std::invalid_argument);
}

TEST_CASE("lp_type_solve on collinear points finds the extreme pair") {
    std::vector<Vec> pts{{0.0, 0.0}, {1.0, 0.0}, {4.0, 0.0}};
    auto r = smallest_enclosing_ball(pts, 123);
    CHECK(r.basis == std::vector<int>{0, 2});
    CHECK_THAT(r.radius, Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(r.center[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(r.center[1], Catch::Matchers::WithinAbs(0.0, 1e-12));

    auto one = smallest_enclosing_ball({{3.0, -1.0}}, 0);
    CHECK(one.basis == std::vector<int>{0});
    CHECK(one.radius == 0.0);

    // Duplicates do not change the value.
    std::vector<Vec> dup(5, Vec{1.0, 2.0});
    dup.push_back({3.0, 2.0});
    auto rd = smallest_enclosing_ball(dup, 5);
    CHECK_THAT(rd.radius, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("smallest_enclosing_ball matches brute force and the basis bound") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int dim = 2; dim <= 3; ++dim) {
        std::uniform_int_distribution<int> npts(1, dim == 2 ? 12 : 10);
        for (int trial = 0; trial < 120; ++trial) {
            std::vector<Vec> pts;
            int n = npts(rng);
            for (int i = 0; i < n; ++i) {
                Vec p(dim);
                for (double& v : p) v = coord(rng);
                pts.push_back(p);
            }
            auto got = smallest_enclosing_ball(pts, static_cast<std::uint64_t>(trial));
            auto ref = oracle::seb_brute(pts);
            CHECK_THAT(got.radius, Catch::Matchers::WithinAbs(ref.radius, 1e-9));
            CHECK(got.basis.size() <= static_cast<std::size_t>(dim) + 1);
            for (const Vec& p : pts) CHECK(distance(got.center, p) <= got.radius + 1e-9);
        }
    }
}

TEST_CASE("unit square corners and forced diameter") {
    auto sq = smallest_enclosing_ball({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, 7);
    CHECK_THAT(sq.radius, Catch::Matchers::WithinAbs(std::sqrt(2.0) / 2.0, 1e-12));
    CHECK_THAT(sq.center[0], Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(sq.center[1], Catch::Matchers::WithinAbs(0.5, 1e-12));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(0.0, 6.28318), rad(0.0, 0.9);
    std::vector<Vec> pts{{-1.0, 0.0}, {1.0, 0.0}};
    for (int i = 0; i < 100; ++i) {
        double r = rad(rng), t = ang(rng);
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    auto got = smallest_enclosing_ball(pts, 9);
    CHECK_THAT(got.radius, Catch::Matchers::WithinAbs(1.0, 1e-9));
    CHECK_THAT(got.center[0], Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(got.center[1], Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("LP-type monotonicity holds exhaustively on small instances") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec> pts;
        for (int i = 0; i < 9; ++i) pts.push_back({coord(rng), coord(rng)});
        std::vector<double> radius_of_mask(1u << pts.size(), 0.0);
        for (std::size_t mask = 1; mask < radius_of_mask.size(); ++mask) {
            std::vector<Vec> sel;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (mask & (1u << i)) sel.push_back(pts[i]);
            radius_of_mask[mask] = oracle::seb_brute(sel).radius;
        }
        for (std::size_t mask = 1; mask < radius_of_mask.size(); ++mask)
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (mask & (1u << i)) continue;
                CHECK(radius_of_mask[mask] <= radius_of_mask[mask | (1u << i)] + 1e-12);
            }
    }
}

TEST_CASE("seed changes never change the returned ball") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<Vec> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({coord(rng), coord(rng)});
    auto a = smallest_enclosing_ball(pts, 0);
    for (std::uint64_t seed : {1ull, 99ull, 123456789ull}) {
        auto b = smallest_enclosing_ball(pts, seed);
        CHECK_THAT(a.radius, Catch::Matchers::WithinAbs(b.radius, 1e-12));
        CHECK_THAT(a.center[0], Catch::Matchers::WithinAbs(b.center[0], 1e-12));
        CHECK_THAT(a.center[1], Catch::Matchers::WithinAbs(b.center[1], 1e-12));
    }
}
