#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qcp/vec.hpp"

namespace qcp {

/// Value of a quasiconvex program: the pair (level, point), ordered
/// lexicographically first by level and then by the point coordinates.
struct SolutionValue {
    double level = 0.0;
    Vec point;
};

/// Lexicographic comparison of two program values. The points must have
/// equal length.
inline std::strong_ordering value_compare(const SolutionValue& a, const SolutionValue& b) {
    if (a.point.size() != b.point.size())
        throw std::invalid_argument("value_compare: dimension mismatch");
    if (a.level < b.level) return std::strong_ordering::less;
    if (a.level > b.level) return std::strong_ordering::greater;
    for (std::size_t i = 0; i < a.point.size(); ++i) {
        if (a.point[i] < b.point[i]) return std::strong_ordering::less;
        if (a.point[i] > b.point[i]) return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

/// An evaluatable objective whose finite lower level sets are convex.
/// `surrogate` characterizes improving directions: any y with
/// y . surrogate(x) > 0 improves the function value near x. For
/// differentiable objectives it equals the negated gradient.
struct QuasiconvexFunction {
    std::size_t dimension = 0;
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> surrogate;  // optional
    std::optional<Vec> minimum_hint;           // optional

    bool has_surrogate() const { return static_cast<bool>(surrogate); }
};

enum class FamilyKind { constant, shrinking };

/// Monotone map lambda -> convex set, realized as a membership predicate.
/// Membership must be monotone: contains(l1, x) and l1 < l2 imply
/// contains(l2, x). A constant family ignores lambda entirely.
///
/// `active_normal` is the step-function surrogate of a constant family:
/// when x sits on (or within a hair of) the set's boundary it returns the
/// inward normal there, else nullopt. The descent solver uses it to slide
/// along active constraints; families without it are enforced by step
/// clipping alone.
struct NestedConvexFamily {
    std::size_t dimension = 0;
    std::function<bool(double lambda, const Vec& x)> contains;
    FamilyKind kind = FamilyKind::shrinking;
    std::function<std::optional<Vec>(const Vec& x)> active_normal;  // optional
};

/// A quasiconvex program: minimize the pointwise max of the objectives
/// over the box, subject to the constraint families (constant families act
/// as plain feasibility constraints).
struct QcpProblem {
    std::size_t dimension = 0;
    std::vector<QuasiconvexFunction> objectives;
    std::vector<NestedConvexFamily> constraints;
    Box bounding_box;

    void validate() const {
        if (objectives.empty() && constraints.empty())
            throw std::invalid_argument("QcpProblem: needs objectives or constraints");
        if (bounding_box.dim() != dimension)
            throw std::invalid_argument("QcpProblem: box dimension mismatch");
        for (const auto& q : objectives)
            if (q.dimension != dimension)
                throw std::invalid_argument("QcpProblem: objective dimension mismatch");
        for (const auto& c : constraints)
            if (c.dimension != dimension)
                throw std::invalid_argument("QcpProblem: constraint dimension mismatch");
    }
};

/// Level-set view of a function restricted to a box: contains(l, x) holds
/// iff x is in the box and q(x) <= l.
inline NestedConvexFamily family_from_function(const QuasiconvexFunction& q, const Box& box,
                                               FamilyKind kind = FamilyKind::shrinking) {
    NestedConvexFamily fam;
    fam.dimension = q.dimension;
    fam.kind = kind;
    fam.contains = [eval = q.eval, box](double lambda, const Vec& x) {
        return box.contains(x) && eval(x) <= lambda;
    };
    return fam;
}

/// Function view of a family: eval(x) = inf { l | x in family(l) },
/// resolved by bisection over [lambda_lo, lambda_hi] to within tol.
/// Returns +inf where even family(lambda_hi) excludes x.
inline QuasiconvexFunction function_from_family(const NestedConvexFamily& family,
                                                double lambda_lo, double lambda_hi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("function_from_family: tol must be positive");
    if (!(lambda_lo < lambda_hi))
        throw std::invalid_argument("function_from_family: need lambda_lo < lambda_hi");
    QuasiconvexFunction q;
    q.dimension = family.dimension;
    q.eval = [family, lambda_lo, lambda_hi, tol](const Vec& x) -> double {
        if (!family.contains(lambda_hi, x)) return kInfinity;
        if (family.kind == FamilyKind::constant) return lambda_lo;
        if (family.contains(lambda_lo, x)) return lambda_lo;
        double lo = lambda_lo, hi = lambda_hi;
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            if (family.contains(mid, x))
                hi = mid;
            else
                lo = mid;
        }
        return hi;  // membership holds at the returned level
    };
    return q;
}

/// max_i fns[i](x); +inf propagates.
inline double pointwise_max(const std::vector<QuasiconvexFunction>& fns, const Vec& x) {
    if (fns.empty()) throw std::invalid_argument("pointwise_max: empty function list");
    double m = -kInfinity;
    for (const auto& f : fns) m = std::max(m, f.eval(x));
    return m;
}

}  // namespace qcp
