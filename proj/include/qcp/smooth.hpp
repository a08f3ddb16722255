#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcp/core.hpp"
#include "qcp/lp.hpp"
#include "qcp/vec.hpp"

namespace qcp {

/// Configuration of the smooth quasiconvex descent loop.
struct SolverConfig {
    double tolerance = 1e-9;     // termination gap on the objective level
    double active_band = 0.0;    // 0 -> max(tolerance, 1e-9 * |level|)
    int max_iterations = 10000;
    double step_shrink = 0.5;    // post-search step multiplier, in (0,1)
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
        if (active_band < 0.0) throw std::invalid_argument("SolverConfig: active_band must be >= 0");
        if (!(step_shrink > 0.0 && step_shrink < 1.0))
            throw std::invalid_argument("SolverConfig: step_shrink must be in (0,1)");
    }
};

enum class Termination { converged, max_iterations, no_improving_direction };

/// Record of one descent pass and of the run as a whole. The level
/// sequence is nonincreasing by construction.
struct SolveTrace {
    struct Iteration {
        Vec x;
        double level = 0.0;
        std::vector<int> active;
        Vec direction;  // empty on the terminating pass
        double step = 0.0;
    };
    std::vector<Iteration> iterations;
    Termination termination = Termination::max_iterations;
};

/// Indices (with surrogate vectors) of the objectives within `band` of the
/// pointwise max at x. Every active objective must carry a surrogate.
inline std::vector<std::pair<int, Vec>> active_set(const QcpProblem& problem, const Vec& x,
                                                   double band) {
    if (problem.objectives.empty()) throw std::invalid_argument("active_set: no objectives");
    std::vector<double> vals(problem.objectives.size());
    double top = -kInfinity;
    for (std::size_t i = 0; i < problem.objectives.size(); ++i) {
        vals[i] = problem.objectives[i].eval(x);
        top = std::max(top, vals[i]);
    }
    std::vector<std::pair<int, Vec>> out;
    for (std::size_t i = 0; i < problem.objectives.size(); ++i) {
        if (!(vals[i] >= top - band)) continue;
        const auto& q = problem.objectives[i];
        if (!q.has_surrogate())
            throw std::runtime_error("active_set: active objective lacks a surrogate");
        out.emplace_back(static_cast<int>(i), q.surrogate(x));
    }
    return out;
}

enum class DirectionMethod { radial2d, lp };

namespace detail {

// 2D shortcut: when the surrogates span less than a halfplane, the
// average of the two angular extremes improves against all of them.
inline std::optional<Vec> improving_direction_radial(const std::vector<Vec>& surrogates) {
    std::vector<double> angles;
    angles.reserve(surrogates.size());
    for (const Vec& g : surrogates) angles.push_back(std::atan2(g[1], g[0]));
    std::sort(angles.begin(), angles.end());
    double max_gap = 2.0 * std::numbers::pi - (angles.back() - angles.front());
    double lo = angles.back(), hi = angles.front() + 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
        double gap = angles[i + 1] - angles[i];
        if (gap > max_gap) {
            max_gap = gap;
            lo = angles[i];
            hi = angles[i + 1];
        }
    }
    if (!(max_gap > std::numbers::pi + 1e-12)) return std::nullopt;  // spans >= halfplane
    // Extremes are the vectors bounding the occupied arc.
    double mid = 0.5 * (hi + lo) + std::numbers::pi;  // bisector of the arc, not the gap
    return Vec{std::cos(mid), std::sin(mid)};
}

}  // namespace detail

/// A unit vector with positive inner product against every surrogate, or
/// nullopt when none exists. The lp method maximizes the worst inner
/// product s over the unit-sup-norm ball via seidel_lp and certifies
/// "none" by s* <= 0.
inline std::optional<Vec> improving_direction(const std::vector<Vec>& surrogates,
                                              DirectionMethod method, std::uint64_t rng_seed = 0) {
    if (surrogates.empty()) throw std::invalid_argument("improving_direction: empty surrogate list");
    std::size_t d = surrogates[0].size();
    double max_norm = 0.0;
    for (const Vec& g : surrogates) {
        if (g.size() != d) throw std::invalid_argument("improving_direction: mixed dimensions");
        max_norm = std::max(max_norm, norm(g));
    }
    for (const Vec& g : surrogates)
        if (norm(g) <= 1e-14 * std::max(1.0, max_norm))
            throw std::invalid_argument("improving_direction: zero surrogate vector");

    if (method == DirectionMethod::radial2d) {
        if (d != 2) throw std::invalid_argument("improving_direction: radial2d requires d == 2");
        auto y = detail::improving_direction_radial(surrogates);
        if (y) {
            bool ok = true;
            for (const Vec& g : surrogates)
                if (!(dot(*y, g) > 0.0)) ok = false;
            if (ok) return y;
        }
        // Spans a halfplane or more (or a borderline case): decide by LP.
    }

    // Variables (y, s): maximize s subject to g_i . y - s >= 0, |y_j| <= 1.
    std::vector<Halfspace> cons;
    cons.reserve(surrogates.size());
    double s_bound = 1.0;
    for (const Vec& g : surrogates) {
        Vec a = g;
        a.push_back(-1.0);
        cons.push_back({std::move(a), 0.0});
        double l1 = 0.0;
        for (double v : g) l1 += std::abs(v);
        s_bound = std::max(s_bound, 1.0 + l1);
    }
    Vec lo(d + 1, -1.0), hi(d + 1, 1.0);
    lo[d] = -s_bound;
    hi[d] = s_bound;
    Vec c(d + 1, 0.0);
    c[d] = -1.0;
    auto sol = seidel_lp(cons, c, Box(lo, hi), rng_seed);
    if (!sol) return std::nullopt;  // cannot happen: (0, -s_bound) is feasible
    double s_opt = -sol->level;
    if (s_opt <= 1e-12 * std::max(1.0, max_norm)) return std::nullopt;
    Vec y(sol->point.begin(), sol->point.begin() + static_cast<std::ptrdiff_t>(d));
    return normalized(y);
}

namespace detail {

// Unit inward normals of the constraints (and box faces) whose boundary
// passes through x. These join the direction search as tangency rows so
// the iterate can slide along an active boundary instead of jamming on it.
inline std::vector<Vec> active_boundary_normals(const QcpProblem& problem, const Vec& x) {
    std::vector<Vec> normals;
    std::size_t d = x.size();
    for (std::size_t j = 0; j < d; ++j) {
        double extent = problem.bounding_box.hi[j] - problem.bounding_box.lo[j];
        if (std::abs(x[j] - problem.bounding_box.lo[j]) <= 1e-9 * extent) {
            Vec n(d, 0.0);
            n[j] = 1.0;
            normals.push_back(std::move(n));
        }
        if (std::abs(x[j] - problem.bounding_box.hi[j]) <= 1e-9 * extent) {
            Vec n(d, 0.0);
            n[j] = -1.0;
            normals.push_back(std::move(n));
        }
    }
    for (const auto& fam : problem.constraints) {
        if (!fam.active_normal) continue;
        auto n = fam.active_normal(x);
        if (n && norm(*n) > 0.0) normals.push_back(normalized(*n));
    }
    return normals;
}

// Direction search with tangency constraints: maximize s subject to
// y.g_i >= s for the objective surrogates and y.n_j >= 0 for the active
// boundary normals, |y|_inf <= 1.
inline std::optional<Vec> improving_direction_constrained(const std::vector<Vec>& surrogates,
                                                          const std::vector<Vec>& normals,
                                                          std::uint64_t rng_seed) {
    std::size_t d = surrogates[0].size();
    std::vector<Halfspace> cons;
    double s_bound = 1.0, max_norm = 0.0;
    for (const Vec& g : surrogates) {
        Vec a = g;
        a.push_back(-1.0);
        cons.push_back({std::move(a), 0.0});
        double l1 = 0.0;
        for (double v : g) l1 += std::abs(v);
        s_bound = std::max(s_bound, 1.0 + l1);
        max_norm = std::max(max_norm, norm(g));
    }
    for (const Vec& n : normals) {
        Vec a = n;
        a.push_back(0.0);
        cons.push_back({std::move(a), 0.0});
    }
    Vec lo(d + 1, -1.0), hi(d + 1, 1.0);
    lo[d] = -s_bound;
    hi[d] = s_bound;
    Vec c(d + 1, 0.0);
    c[d] = -1.0;
    auto sol = seidel_lp(cons, c, Box(lo, hi), rng_seed);
    if (!sol) return std::nullopt;
    if (-sol->level <= 1e-12 * std::max(1.0, max_norm)) return std::nullopt;
    Vec y(sol->point.begin(), sol->point.begin() + static_cast<std::ptrdiff_t>(d));
    return normalized(y);
}

inline bool point_feasible(const QcpProblem& problem, const Vec& x, double level) {
    if (!problem.bounding_box.contains(x, 1e-12)) return false;
    for (const auto& fam : problem.constraints)
        if (!fam.contains(level, x)) return false;
    return true;
}

// Largest step along y keeping x + eps*y inside the box and all constraint
// families. The box bound is exact; family boundaries are located by
// bisection.
inline double max_feasible_step(const QcpProblem& problem, const Vec& x, const Vec& y,
                                double level) {
    double eps_max = kInfinity;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (y[j] > 0)
            eps_max = std::min(eps_max, (problem.bounding_box.hi[j] - x[j]) / y[j]);
        else if (y[j] < 0)
            eps_max = std::min(eps_max, (problem.bounding_box.lo[j] - x[j]) / y[j]);
    }
    if (!std::isfinite(eps_max)) eps_max = problem.bounding_box.diameter();
    eps_max = std::max(eps_max, 0.0);
    if (problem.constraints.empty() || eps_max == 0.0) return eps_max;
    if (point_feasible(problem, axpy(x, eps_max, y), level)) return eps_max;
    double lo = 0.0, hi = eps_max;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (point_feasible(problem, axpy(x, mid, y), level))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace detail

/// Doubling-then-halve step search along an improving direction: find the
/// largest power-of-two-scaled feasible step that does not increase the
/// pointwise max, then shrink it by step_shrink. Returns 0 when no
/// positive step improves within machine precision.
inline double line_search(const QcpProblem& problem, const Vec& x, const Vec& y,
                          const SolverConfig& config) {
    config.validate();
    double q0 = pointwise_max(problem.objectives, x);
    if (!std::isfinite(q0)) throw std::invalid_argument("line_search: infeasible start point");
    double eps_max = detail::max_feasible_step(problem, x, y, q0);
    if (eps_max <= 0.0) return 0.0;

    auto accepts = [&](double e) {
        Vec z = axpy(x, e, y);
        return pointwise_max(problem.objectives, z) <= q0;
    };
    double eps = std::ldexp(eps_max, -40);
    int halvings = 0;
    while (!accepts(eps)) {
        eps *= 0.5;
        if (++halvings > 60) return 0.0;  // zero-step signal
    }
    while (2.0 * eps <= eps_max && accepts(2.0 * eps)) eps *= 2.0;
    return config.step_shrink * eps;
}

/// Smooth quasiconvex programming: repeatedly collect the active
/// surrogates, find an improving direction (radial sort in 2D, LP
/// otherwise), and advance by the doubling-then-halve line search.
///
/// The active band is adaptive: directions are tried at a ladder of bands
/// from coarse to fine, so near-ties well above the tolerance still steer
/// the step toward their common improvement cone (the narrow-lens
/// situation of two almost equidistant sites). Termination is certified
/// only on the configured floor band: no improving direction there, two
/// consecutive zero steps, or the iteration cap.
inline std::pair<SolutionValue, SolveTrace> minimize(const QcpProblem& problem, const Vec& x0,
                                                     const SolverConfig& config) {
    config.validate();
    problem.validate();
    if (problem.objectives.empty()) throw std::invalid_argument("minimize: no objectives");
    Vec x = x0;
    double level = pointwise_max(problem.objectives, x);
    if (!detail::point_feasible(problem, x, level) || !std::isfinite(level))
        throw std::invalid_argument("minimize: infeasible start point");

    SolveTrace trace;
    int zero_steps = 0;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        double floor_band = config.active_band > 0.0
                                ? config.active_band
                                : std::max(config.tolerance, 1e-9 * std::abs(level));
        std::vector<double> bands;
        for (double b = std::max(floor_band, 0.125 * std::abs(level)); b > 1.5 * floor_band;
             b *= 0.125)
            bands.push_back(b);
        bands.push_back(floor_band);

        SolveTrace::Iteration rec;
        rec.x = x;
        rec.level = level;

        auto normals = detail::active_boundary_normals(problem, x);
        std::uint64_t seed = config.rng_seed + static_cast<std::uint64_t>(iter);
        for (double band : bands) {
            bool is_floor = band == bands.back();
            auto active = active_set(problem, x, band);
            double gmax = 0.0;
            for (const auto& [i, g] : active) gmax = std::max(gmax, norm(g));
            bool at_minimum = false;
            std::vector<Vec> surrogates;
            surrogates.reserve(active.size());
            for (const auto& [i, g] : active) {
                if (norm(g) <= 1e-13 * std::max(1.0, gmax)) at_minimum = true;
                surrogates.push_back(g);
            }
            if (at_minimum) {
                // An active objective at its own minimum pins the max; on a
                // coarser band it merely rules that band out.
                if (!is_floor) continue;
                for (const auto& [i, g] : active) rec.active.push_back(i);
                trace.iterations.push_back(std::move(rec));
                trace.termination = Termination::no_improving_direction;
                return {SolutionValue{level, x}, trace};
            }
            std::optional<Vec> dir;
            if (normals.empty()) {
                auto method =
                    problem.dimension == 2 ? DirectionMethod::radial2d : DirectionMethod::lp;
                dir = improving_direction(surrogates, method, seed);
            } else {
                dir = detail::improving_direction_constrained(surrogates, normals, seed);
            }
            if (!dir) {
                if (!is_floor) continue;
                for (const auto& [i, g] : active) rec.active.push_back(i);
                trace.iterations.push_back(std::move(rec));
                trace.termination = Termination::no_improving_direction;
                return {SolutionValue{level, x}, trace};
            }
            double eps = line_search(problem, x, *dir, config);
            if (eps <= 0.0) {
                if (!is_floor) continue;
                for (const auto& [i, g] : active) rec.active.push_back(i);
                rec.direction = *dir;
                rec.step = 0.0;
                trace.iterations.push_back(std::move(rec));
                if (++zero_steps >= 2) {
                    trace.termination = Termination::converged;
                    return {SolutionValue{level, x}, trace};
                }
                break;  // recorded; retry on the next pass
            }
            Vec next = axpy(x, eps, *dir);
            double next_level = std::min(level, pointwise_max(problem.objectives, next));
            bool progressed = next_level < level - 1e-15 * (1.0 + std::abs(level));
            // Coarse bands are accelerators only: a band whose step makes
            // no measurable progress falls through to a finer one.
            if (!progressed && !is_floor) continue;
            for (const auto& [i, g] : active) rec.active.push_back(i);
            rec.direction = *dir;
            rec.step = eps;
            trace.iterations.push_back(std::move(rec));
            x = std::move(next);
            level = next_level;
            if (!progressed) {
                // Precision exhaustion at the floor band.
                if (++zero_steps >= 2) {
                    trace.termination = Termination::converged;
                    return {SolutionValue{level, x}, trace};
                }
            } else {
                zero_steps = 0;
            }
            break;
        }
    }
    trace.termination = Termination::max_iterations;
    return {SolutionValue{level, x}, trace};
}

}  // namespace qcp
