#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qcp/core.hpp"
#include "qcp/smooth.hpp"
#include "qcp/vec.hpp"

#include "json.hpp"

namespace qcp {

using BigInt = boost::multiprecision::cpp_int;

/// Multivariate max-of-sums recurrence. Each case is a multiset of integer
/// decrement vectors (multiplicity by repetition): the case's term
/// contributes sum_j T(x - delta_j) to the max.
struct Recurrence {
    std::vector<std::string> variable_names;
    std::vector<std::vector<std::vector<std::int64_t>>> cases;

    std::size_t arity() const { return variable_names.size(); }
};

/// Fixed direction x = n*t along which the growth base is measured.
struct TargetVector {
    Vec t;

    explicit TargetVector(Vec t_) : t(std::move(t_)) {
        if (norm(t) == 0.0) throw std::invalid_argument("TargetVector: t must be nonzero");
    }
};

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

namespace detail {

struct RecLexer {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1, col = 1;

    explicit RecLexer(const std::string& s) : text(s) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance();
    }
    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }
    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            advance();
            return true;
        }
        return false;
    }
    std::string ident() {
        skip_ws();
        if (pos >= text.size() || !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            fail("expected identifier");
        std::string s;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            s += text[pos];
            advance();
        }
        return s;
    }
    std::int64_t integer() {
        skip_ws();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            fail("expected integer");
        std::int64_t v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            advance();
        }
        return v;
    }
};

inline Recurrence parse_recurrence_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(1, 1, std::string("invalid JSON: ") + e.what());
    }
    Recurrence r;
    if (!j.contains("vars") || !j["vars"].is_array() || j["vars"].empty())
        throw ParseError(1, 1, "JSON recurrence needs a nonempty \"vars\" array");
    for (const auto& v : j["vars"]) r.variable_names.push_back(v.get<std::string>());
    if (!j.contains("cases") || !j["cases"].is_array() || j["cases"].empty())
        throw ParseError(1, 1, "JSON recurrence needs a nonempty \"cases\" array");
    for (const auto& jc : j["cases"]) {
        std::vector<std::vector<std::int64_t>> c;
        for (const auto& jd : jc) {
            if (!jd.is_array() || jd.size() != r.variable_names.size())
                throw ParseError(1, 1, "decrement vector arity mismatch");
            std::vector<std::int64_t> delta;
            for (const auto& comp : jd) {
                if (!comp.is_number_integer())
                    throw ParseError(1, 1, "non-integer decrement");
                auto v = comp.get<std::int64_t>();
                if (v < 0) throw ParseError(1, 1, "negative decrement");
                delta.push_back(v);
            }
            bool nonzero = false;
            for (auto v : delta) nonzero |= (v != 0);
            if (!nonzero) throw ParseError(1, 1, "all-zero decrement vector");
            c.push_back(std::move(delta));
        }
        if (c.empty()) throw ParseError(1, 1, "empty case");
        r.cases.push_back(std::move(c));
    }
    return r;
}

}  // namespace detail

/// Parse the recurrence DSL, e.g.
///   T(n,k) = max{ T(n-1,k-1); 2 T(n-2,k-1); T(n-1,k) + T(n-4,k-1) }
/// A multiplier m expands to m repeated decrement vectors. Decrements must
/// be positive integers (written `var-3`); a bare variable name means no
/// decrement in that component. A JSON object {"vars":..., "cases":...}
/// is accepted as an alternative syntax.
inline Recurrence parse_recurrence(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return detail::parse_recurrence_json(text);

    detail::RecLexer lx(text);
    Recurrence r;
    std::string name = lx.ident();
    lx.expect('(');
    r.variable_names.push_back(lx.ident());
    while (lx.accept(',')) r.variable_names.push_back(lx.ident());
    lx.expect(')');
    lx.expect('=');
    std::string kw = lx.ident();
    if (kw != "max") lx.fail("expected 'max'");
    lx.expect('{');

    auto parse_term = [&](std::vector<std::vector<std::int64_t>>& out) {
        std::int64_t mult = 1;
        lx.skip_ws();
        if (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
            mult = lx.integer();
            if (mult < 1) lx.fail("multiplier must be a positive integer");
        }
        std::string fn = lx.ident();
        if (fn != name) lx.fail("term must recurse on '" + name + "'");
        lx.expect('(');
        std::vector<std::int64_t> delta;
        for (std::size_t i = 0; i < r.variable_names.size(); ++i) {
            if (i > 0) lx.expect(',');
            std::string var = lx.ident();
            if (var != r.variable_names[i])
                lx.fail("expected variable '" + r.variable_names[i] + "' in position " +
                        std::to_string(i + 1));
            if (lx.accept('-')) {
                std::int64_t d = lx.integer();
                if (d < 1) lx.fail("decrement must be a positive integer");
                delta.push_back(d);
            } else if (lx.peek() == '+') {
                lx.fail("non-positive decrement (arguments may not grow)");
            } else {
                delta.push_back(0);
            }
        }
        lx.expect(')');
        bool nonzero = false;
        for (auto v : delta) nonzero |= (v != 0);
        if (!nonzero) lx.fail("term repeats the left-hand side (all-zero decrement)");
        for (std::int64_t k = 0; k < mult; ++k) out.push_back(delta);
    };

    while (true) {
        std::vector<std::vector<std::int64_t>> c;
        parse_term(c);
        while (lx.accept('+')) parse_term(c);
        r.cases.push_back(std::move(c));
        if (lx.accept(';')) {
            if (lx.peek() == '}') break;  // trailing separator
            continue;
        }
        break;
    }
    lx.expect('}');
    if (!lx.eof()) lx.fail("trailing input after '}'");
    return r;
}

namespace detail {

inline double case_exponent(const std::vector<std::int64_t>& delta, const Vec& w) {
    double e = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) e += w[i] * static_cast<double>(delta[i]);
    return e;
}

}  // namespace detail

/// Characteristic growth base of one case at weight vector w: the root
/// lambda >= 1 of sum_j lambda^(-w.delta_j) = 1, or +inf when some
/// weighted decrement w.delta_j is nonpositive (the associated linear
/// recurrence is unsolvable). A single-term case has root exactly 1.
inline double case_growth(const std::vector<std::vector<std::int64_t>>& c, const Vec& w) {
    std::vector<double> e;
    e.reserve(c.size());
    for (const auto& delta : c) {
        double ex = detail::case_exponent(delta, w);
        if (ex <= 0.0) return kInfinity;
        e.push_back(ex);
    }
    if (e.size() == 1) return 1.0;
    auto f = [&](double lambda) {
        double s = -1.0;
        for (double ex : e) s += std::pow(lambda, -ex);
        return s;
    };
    // f is strictly decreasing for lambda > 1 and f(1) = count - 1 > 0.
    double lo = 1.0 + 1e-15, hi = 2.0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) return kInfinity;  // exponents too small to matter numerically
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double precision
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Surrogate of case_growth for the descent solver: -grad_w lambda, from
/// implicit differentiation of F(lambda, w) = sum_j lambda^(-w.delta_j) - 1.
inline Vec case_growth_surrogate(const std::vector<std::vector<std::int64_t>>& c, const Vec& w,
                                 double lambda) {
    if (!(lambda > 1.0 + 1e-12))
        throw std::invalid_argument("case_growth_surrogate: degenerate root (lambda <= 1)");
    std::size_t d = w.size();
    double logl = std::log(lambda);
    double dF_dlambda = 0.0;
    Vec dF_dw(d, 0.0);
    for (const auto& delta : c) {
        double ex = detail::case_exponent(delta, w);
        double pw = std::pow(lambda, -ex);
        dF_dlambda += -ex * pw / lambda;
        for (std::size_t i = 0; i < d; ++i)
            dF_dw[i] += -static_cast<double>(delta[i]) * logl * pw;
    }
    // grad_w lambda = -(dF/dw) / (dF/dlambda); the surrogate negates it.
    Vec surrogate(d);
    for (std::size_t i = 0; i < d; ++i) surrogate[i] = dF_dw[i] / dF_dlambda;
    return surrogate;
}

/// Output of the growth analysis: the minimized growth base lambda, the
/// optimal weights (normalized to w.t = 1), and the cases attaining the
/// max within the solver's active band (1-based, in input order).
struct AnalysisReport {
    double lambda = 1.0;
    Vec weights;
    std::vector<int> tight_cases;
    SolveTrace trace;
};

namespace detail {

struct HyperplaneParam {
    std::size_t pivot;  // coordinate of t eliminated (largest |t_j|)
    Vec t;

    explicit HyperplaneParam(const Vec& target) : t(target) {
        pivot = 0;
        for (std::size_t j = 1; j < t.size(); ++j)
            if (std::abs(t[j]) > std::abs(t[pivot])) pivot = j;
    }

    Vec lift(const Vec& u) const {
        Vec w(t.size());
        double acc = 1.0;
        std::size_t k = 0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j == pivot) continue;
            w[j] = u[k];
            acc -= t[j] * u[k];
            ++k;
        }
        w[pivot] = acc / t[pivot];
        return w;
    }

    Vec reduce(const Vec& w) const {
        Vec u;
        u.reserve(t.size() - 1);
        for (std::size_t j = 0; j < t.size(); ++j)
            if (j != pivot) u.push_back(w[j]);
        return u;
    }

    // Chain rule: (grad_u)_k = (grad_w)_k - (t_k / t_pivot) (grad_w)_pivot.
    Vec reduce_gradient(const Vec& gw) const {
        Vec gu;
        gu.reserve(t.size() - 1);
        for (std::size_t j = 0; j < t.size(); ++j)
            if (j != pivot) gu.push_back(gw[j] - (t[j] / t[pivot]) * gw[pivot]);
        return gu;
    }
};

inline bool all_cases_finite(const Recurrence& r, const Vec& w) {
    for (const auto& c : r.cases)
        if (!std::isfinite(case_growth(c, w))) return false;
    return true;
}

// One seeded random restart candidate on w.t = 1, or nullopt when it is
// infeasible; each restart index owns an independent RNG stream.
inline std::optional<Vec> restart_candidate(const Recurrence& r, const Vec& t, std::uint64_t seed,
                                            int restart) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(restart + 1));
    std::uniform_real_distribution<double> uni(0.0, 2.0);
    Vec cand(t.size());
    for (double& v : cand) v = uni(rng);
    double s = dot(cand, t);
    if (std::abs(s) <= 1e-9) return std::nullopt;
    cand = scaled(cand, 1.0 / s);
    if (!all_cases_finite(r, cand)) return std::nullopt;
    return cand;
}

// Initial weight vector on w.t = 1: start from the projection t/|t|^2,
// nudge coordinates whose zero weighted decrement forces +inf, then fall
// back to seeded random restarts (evaluated `jobs` at a time; the lowest
// feasible restart index wins, so the result is independent of jobs).
inline Vec initial_weights(const Recurrence& r, const Vec& t, std::uint64_t seed, int jobs = 1) {
    Vec w = scaled(t, 1.0 / norm_sq(t));
    for (int round = 0; round < 8 && !all_cases_finite(r, w); ++round) {
        Vec nudged = w;
        for (const auto& c : r.cases)
            for (const auto& delta : c) {
                if (case_exponent(delta, w) > 0.0) continue;
                for (std::size_t j = 0; j < delta.size(); ++j)
                    if (delta[j] > 0) nudged[j] += 0.1;
            }
        double s = dot(nudged, t);
        if (s <= 1e-12) break;
        w = scaled(nudged, 1.0 / s);
    }
    if (all_cases_finite(r, w)) return w;
    const int total = 50;
    jobs = std::max(1, jobs);
    for (int block = 0; block < total; block += jobs) {
        int count = std::min(jobs, total - block);
        std::vector<std::future<std::optional<Vec>>> batch;
        for (int k = 1; k < count; ++k)
            batch.push_back(std::async(std::launch::async, restart_candidate, std::cref(r),
                                       std::cref(t), seed, block + k));
        auto first = restart_candidate(r, t, seed, block);
        if (first) return *first;
        for (auto& f : batch) {
            auto cand = f.get();
            if (cand) return *cand;
        }
    }
    throw std::runtime_error("analyze: no weight vector keeps every case finite");
}

}  // namespace detail

/// Minimize max_i case_growth_i(w) over the hyperplane w.t = 1 (the
/// normalizing condition), yielding the tightest O(lambda^n) bound on
/// T(n t). The hyperplane is parametrized by eliminating the coordinate
/// with the largest |t_j| and the reduced problem goes to the smooth
/// solver.
inline AnalysisReport analyze(const Recurrence& r, const TargetVector& target,
                              const SolverConfig& config = {}, int jobs = 1) {
    if (r.cases.empty()) throw std::invalid_argument("analyze: recurrence has no cases");
    if (target.t.size() != r.arity())
        throw std::invalid_argument("analyze: target dimension mismatch");
    config.validate();

    Vec w0 = detail::initial_weights(r, target.t, config.rng_seed, jobs);
    std::size_t d = r.arity();

    AnalysisReport report;
    if (d == 1) {
        // w is fully determined by the normalization.
        report.weights = w0;
        double top = -kInfinity;
        for (const auto& c : r.cases) top = std::max(top, case_growth(c, w0));
        report.lambda = top;
        double band = config.active_band > 0.0 ? config.active_band
                                               : std::max(config.tolerance, 1e-9 * std::abs(top));
        for (std::size_t i = 0; i < r.cases.size(); ++i)
            if (case_growth(r.cases[i], w0) >= top - band)
                report.tight_cases.push_back(static_cast<int>(i) + 1);
        report.trace.termination = Termination::no_improving_direction;
        return report;
    }

    detail::HyperplaneParam param(target.t);
    QcpProblem prob;
    prob.dimension = d - 1;
    for (const auto& c : r.cases) {
        QuasiconvexFunction q;
        q.dimension = d - 1;
        q.eval = [c, param](const Vec& u) { return case_growth(c, param.lift(u)); };
        q.surrogate = [c, param](const Vec& u) {
            Vec w = param.lift(u);
            double lambda = case_growth(c, w);
            if (!(lambda > 1.0 + 1e-12)) return Vec(u.size(), 0.0);  // flat: at its minimum
            Vec s = case_growth_surrogate(c, w, lambda);
            // s = -grad_w lambda; the reduction is linear, so it chains.
            return param.reduce_gradient(s);
        };
        prob.objectives.push_back(std::move(q));
    }
    Vec u0 = param.reduce(w0);
    Vec lo(d - 1), hi(d - 1);
    for (std::size_t k = 0; k < d - 1; ++k) {
        lo[k] = u0[k] - 128.0;
        hi[k] = u0[k] + 128.0;
    }
    prob.bounding_box = Box(lo, hi);

    auto [value, trace] = minimize(prob, u0, config);
    report.lambda = value.level;
    report.weights = param.lift(value.point);
    report.trace = std::move(trace);
    if (!report.trace.iterations.empty())
        for (int i : report.trace.iterations.back().active)
            report.tight_cases.push_back(i + 1);
    return report;
}

/// Base-case policy for exact evaluation: `special` is consulted first
/// (the paper-style relation bases, e.g. zero above the diagonal); then
/// any component below its floor yields 0 and the exact floor vector
/// yields 1.
struct BasePolicy {
    std::vector<std::int64_t> floors;  // default: all zero
    std::function<std::optional<BigInt>(const std::vector<std::int64_t>&)> special;
};

/// Exact memoized evaluation of the recurrence: T(x) = max over cases of
/// sum_j T(x - delta_j), in arbitrary-precision integers. Components are
/// capped (default 60 each) to bound the table.
inline BigInt evaluate_recurrence(const Recurrence& r, const std::vector<std::int64_t>& x,
                                  const BasePolicy& base = {}, std::int64_t cap = 60) {
    if (x.size() != r.arity())
        throw std::invalid_argument("evaluate_recurrence: argument arity mismatch");
    for (auto v : x)
        if (v > cap) throw std::invalid_argument("evaluate_recurrence: component exceeds cap");
    std::vector<std::int64_t> floors = base.floors;
    if (floors.empty()) floors.assign(r.arity(), 0);
    if (floors.size() != r.arity())
        throw std::invalid_argument("evaluate_recurrence: floor arity mismatch");

    std::map<std::vector<std::int64_t>, BigInt> memo;
    std::function<BigInt(const std::vector<std::int64_t>&)> eval =
        [&](const std::vector<std::int64_t>& arg) -> BigInt {
        if (base.special) {
            auto v = base.special(arg);
            if (v) return *v;
        }
        for (std::size_t i = 0; i < arg.size(); ++i)
            if (arg[i] < floors[i]) return BigInt(0);
        if (arg == floors) return BigInt(1);
        auto it = memo.find(arg);
        if (it != memo.end()) return it->second;
        BigInt best = 0;
        for (const auto& c : r.cases) {
            BigInt sum = 0;
            for (const auto& delta : c) {
                std::vector<std::int64_t> next(arg);
                for (std::size_t i = 0; i < next.size(); ++i) next[i] -= delta[i];
                sum += eval(next);
            }
            if (sum > best) best = sum;
        }
        memo.emplace(arg, best);
        return best;
    };
    return eval(x);
}

}  // namespace qcp
