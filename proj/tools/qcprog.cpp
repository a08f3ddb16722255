// qcprog: batch front end for the quasiconvex programming toolkit.
// One subcommand per problem family, JSON in/out, deterministic seeding.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_out.hpp"
#include "qcp/qcp.hpp"

using nlohmann::json;
using namespace qcp;

namespace {

struct RunConfig {
    double tolerance = 1e-9;
    int max_iterations = 10000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format = "json";
    int jobs = 1;

    SolverConfig solver() const {
        SolverConfig cfg;
        cfg.tolerance = tolerance;
        cfg.max_iterations = max_iterations;
        cfg.rng_seed = seed;
        return cfg;
    }
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw InputError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON input: ") + e.what());
    }
}

Vec parse_vec(const json& j, std::size_t want_dim = 0) {
    if (!j.is_array() || (want_dim && j.size() != want_dim))
        throw InputError("expected a coordinate array" +
                         (want_dim ? " of length " + std::to_string(want_dim) : std::string()));
    Vec v;
    for (const auto& c : j) {
        if (!c.is_number()) throw InputError("coordinates must be numbers");
        v.push_back(c.get<double>());
    }
    return v;
}

std::vector<Vec> parse_points(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_array() || j[field].empty())
        throw InputError(std::string("input needs a nonempty \"") + field + "\" array");
    std::vector<Vec> pts;
    for (const auto& p : j[field]) pts.push_back(parse_vec(p));
    for (const Vec& p : pts)
        if (p.size() != pts[0].size()) throw InputError("points have mixed dimensions");
    return pts;
}

Box parse_box(const json& j, std::size_t dim) {
    if (!j.contains("box")) throw InputError("input needs a \"box\" object with lo/hi");
    const json& b = j["box"];
    if (!b.contains("lo") || !b.contains("hi")) throw InputError("box needs lo and hi arrays");
    return Box(parse_vec(b["lo"], dim), parse_vec(b["hi"], dim));
}

std::vector<Halfspace> parse_halfspaces(const json& j, std::size_t dim) {
    std::vector<Halfspace> out;
    for (const auto& h : j) {
        if (!h.contains("normal") || !h.contains("offset"))
            throw InputError("halfplane needs \"normal\" and \"offset\"");
        out.push_back({parse_vec(h["normal"], dim), h["offset"].get<double>()});
    }
    if (out.empty()) throw InputError("empty halfplane list");
    return out;
}

QualityMeasure parse_measure(const std::string& name) {
    if (name == "max_angle") return QualityMeasure::max_angle;
    if (name == "aspect_ratio") return QualityMeasure::aspect_ratio;
    if (name == "perimeter") return QualityMeasure::perimeter;
    if (name == "circumradius") return QualityMeasure::circumradius;
    if (name == "bank_smith") return QualityMeasure::bank_smith;
    throw InputError("unknown quality measure: " + name);
}

TriMesh parse_mesh(const json& j) {
    if (!j.contains("mesh")) throw InputError("input needs a \"mesh\" object");
    const json& m = j["mesh"];
    TriMesh mesh;
    for (const auto& v : m.at("vertices")) mesh.vertices.push_back(parse_vec(v, 2));
    for (const auto& t : m.at("triangles")) {
        if (!t.is_array() || t.size() != 3) throw InputError("triangles must be index triples");
        mesh.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
    if (m.contains("fixed"))
        for (const auto& f : m.at("fixed")) mesh.fixed.push_back(f.get<bool>());
    else
        mesh.fixed.assign(mesh.vertices.size(), false);
    try {
        mesh.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return mesh;
}

void emit(const std::string& s) { std::fputs((s + "\n").c_str(), stdout); }

std::string format_point(const Vec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += qcprog::format_double(v[i]);
    }
    return s + ")";
}

// --- subcommands -----------------------------------------------------------

int run_seb(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    auto pts = parse_points(j, "points");
    auto r = smallest_enclosing_ball(pts, cfg.seed);
    if (cfg.format == "report") {
        emit("smallest enclosing ball");
        emit("  points: " + std::to_string(pts.size()));
        emit("  center: " + format_point(r.center));
        emit("  radius: " + qcprog::format_double(r.radius));
        std::string b = "  basis:";
        for (int i : r.basis) b += " " + std::to_string(i);
        emit(b);
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("center").value(r.center);
    w.key("radius").value(r.radius);
    w.key("basis").value(r.basis);
    w.key("dimension").value(static_cast<int>(pts[0].size()));
    w.end_object();
    emit(w.str());
    return 0;
}

int run_seb_balls(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    if (!j.contains("balls") || !j["balls"].is_array() || j["balls"].empty())
        throw InputError("input needs a nonempty \"balls\" array");
    std::vector<Ball> balls;
    for (const auto& b : j["balls"]) {
        double rad = b.at("radius").get<double>();
        if (rad < 0) throw InputError("ball radius must be nonnegative");
        balls.push_back({parse_vec(b.at("center")), rad});
    }
    auto r = seb_of_balls(balls, cfg.solver());
    if (cfg.format == "report") {
        emit("smallest enclosing ball of balls");
        emit("  center: " + format_point(r.center));
        emit("  radius: " + qcprog::format_double(r.radius));
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("center").value(r.center);
    w.key("radius").value(r.radius);
    w.end_object();
    emit(w.str());
    return 0;
}

int run_seb_hyp(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    auto raw = parse_points(j, "points");
    std::vector<KleinPoint> pts;
    for (const Vec& p : raw) {
        if (norm(p) >= 1.0 - 1e-12)
            throw InputError("hyperbolic points must lie strictly inside the unit ball");
        pts.emplace_back(p);
    }
    auto r = hyperbolic_seb(pts, cfg.solver());
    if (cfg.format == "report") {
        emit("hyperbolic smallest enclosing ball (Klein coordinates)");
        emit("  center: " + format_point(r.center.coords));
        emit("  radius: " + qcprog::format_double(r.radius));
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("center").value(r.center.coords);
    w.key("radius").value(r.radius);
    w.end_object();
    emit(w.str());
    return 0;
}

int run_sight(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    auto verts = parse_points(j, "vertices");
    std::optional<StarPolygon> poly;
    try {
        poly.emplace(verts);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    auto r = sighting_point(*poly, cfg.solver());
    if (cfg.format == "report") {
        emit("sighting point");
        emit("  viewpoint:  " + format_point(r.viewpoint));
        emit("  resolution: " + qcprog::format_double(r.resolution) + " degrees");
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("viewpoint").value(r.viewpoint);
    w.key("resolution").value(r.resolution);
    w.end_object();
    emit(w.str());
    return 0;
}

int run_illum(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    if (!j.contains("pairs") || !j["pairs"].is_array() || j["pairs"].empty())
        throw InputError("input needs a nonempty \"pairs\" array");
    std::vector<RoomFacePair> pairs;
    for (const auto& p : j["pairs"]) {
        Vec n = parse_vec(p.at("normal"), 3);
        double nn = norm(n);
        if (nn == 0.0) throw InputError("face normal must be nonzero");
        pairs.push_back({scaled(n, 1.0 / nn), parse_vec(p.at("vertex"), 3)});
    }
    Box room = parse_box(j, 3);
    auto r = optimal_illumination(pairs, room, cfg.solver());
    if (cfg.format == "report") {
        emit("optimal illumination");
        emit("  source:    " + format_point(r.source));
        emit("  intensity: " + qcprog::format_double(r.intensity));
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("source").value(r.source);
    w.key("intensity").value(r.intensity);
    w.end_object();
    emit(w.str());
    return 0;
}

int run_lip(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    if (!j.contains("sets") || !j["sets"].is_array() || j["sets"].empty())
        throw InputError("input needs a nonempty \"sets\" array");
    Box box = parse_box(j, 2);
    std::vector<std::vector<Halfspace>> sets;
    for (const auto& s : j["sets"]) sets.push_back(parse_halfspaces(s, 2));

    if (j.contains("values")) {
        if (!j["values"].is_array() || j["values"].size() != sets.size())
            throw InputError("\"values\" must match the number of sets");
        std::vector<ValuedConvexSet> vsets;
        for (std::size_t i = 0; i < sets.size(); ++i)
            vsets.push_back({sets[i], j["values"][i].get<double>()});
        auto r = longest_valued_intersection(vsets, box);
        if (cfg.format == "report") {
            emit("longest valued intersection");
            emit("  threshold: " + (std::isfinite(r.threshold)
                                        ? qcprog::format_double(r.threshold)
                                        : std::string("unbounded")));
            if (r.witness) emit("  witness:   " + format_point(*r.witness));
            return 0;
        }
        qcprog::JsonWriter w;
        w.begin_object();
        w.key("threshold");
        if (std::isfinite(r.threshold))
            w.value(r.threshold);
        else
            w.null();
        w.key("witness");
        if (r.witness)
            w.value(*r.witness);
        else
            w.null();
        w.end_object();
        emit(w.str());
        return 0;
    }

    auto r = longest_intersecting_prefix(sets, box);
    if (r.length == 0) throw InputError("first set does not meet the box");
    if (cfg.format == "report") {
        emit("longest intersecting prefix");
        emit("  length:  " + std::to_string(r.length));
        if (r.witness) emit("  witness: " + format_point(*r.witness));
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("length").value(r.length);
    w.key("witness");
    if (r.witness)
        w.value(*r.witness);
    else
        w.null();
    w.end_object();
    emit(w.str());
    return 0;
}

int run_mesh_smooth(const std::string& input, const RunConfig& cfg) {
    json j = load_json(input);
    TriMesh mesh = parse_mesh(j);
    QualityMeasure m = parse_measure(j.value("measure", "max_angle"));
    int passes = j.value("passes", 1);
    if (passes < 0) throw InputError("passes must be nonnegative");

    auto worst = [&](const TriMesh& msh) {
        double w = -kInfinity;
        for (const auto& t : msh.triangles)
            w = std::max(w, triangle_quality(m, msh.vertices[static_cast<std::size_t>(t[0])],
                                             msh.vertices[static_cast<std::size_t>(t[1])],
                                             msh.vertices[static_cast<std::size_t>(t[2])]));
        return w;
    };
    double before = worst(mesh);
    TriMesh out = smooth_mesh(mesh, m, passes, cfg.solver());
    double after = worst(out);

    if (cfg.format == "report") {
        emit("mesh smoothing");
        emit("  vertices:     " + std::to_string(out.vertices.size()));
        emit("  triangles:    " + std::to_string(out.triangles.size()));
        emit("  worst before: " + qcprog::format_double(before));
        emit("  worst after:  " + qcprog::format_double(after));
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("mesh").begin_object();
    w.key("vertices").begin_array();
    for (const Vec& v : out.vertices) w.value(v);
    w.end_array();
    w.key("triangles").begin_array();
    for (const auto& t : out.triangles) {
        w.begin_array();
        w.value(t[0]).value(t[1]).value(t[2]);
        w.end_array();
    }
    w.end_array();
    w.key("fixed").begin_array();
    for (bool f : out.fixed) w.value(f);
    w.end_array();
    w.end_object();
    w.key("worst_before").value(before);
    w.key("worst_after").value(after);
    w.end_object();
    emit(w.str());
    return 0;
}

int run_recurrence(const std::string& input, const std::string& target_str, const RunConfig& cfg) {
    std::string text = read_file(input);
    Recurrence rec;
    try {
        rec = parse_recurrence(text);
    } catch (const ParseError& e) {
        throw InputError(e.what());
    }
    Vec t;
    {
        std::stringstream ss(target_str);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                t.push_back(std::stod(tok));
            } catch (...) {
                throw InputError("invalid --target component: " + tok);
            }
        }
    }
    if (t.size() != rec.arity())
        throw InputError("--target arity does not match the recurrence variables");
    auto report = analyze(rec, TargetVector(t), cfg.solver(), cfg.jobs);
    if (cfg.format == "report") {
        emit("recurrence growth analysis");
        emit("  lambda:  " + qcprog::format_double(report.lambda));
        emit("  weights: " + format_point(report.weights));
        std::string tc = "  tight cases:";
        for (int i : report.tight_cases) tc += " " + std::to_string(i);
        emit(tc);
        return 0;
    }
    qcprog::JsonWriter w;
    w.begin_object();
    w.key("lambda").value(report.lambda);
    w.key("weights").value(report.weights);
    w.key("tight_cases").value(report.tight_cases);
    w.key("iterations").value(static_cast<int>(report.trace.iterations.size()));
    w.end_object();
    emit(w.str());
    return 0;
}

// Level-set sampler: grid x grid cell centers over the bounds, one CSV row
// per cell with the pointwise max objective (nan where undefined).
int run_levelset(const std::string& input, int grid, const std::string& bounds_str,
                 const RunConfig& cfg) {
    json j = load_json(input);
    if (grid < 1) throw InputError("grid must be >= 1");
    std::string kind = j.value("problem", "seb");

    std::vector<QuasiconvexFunction> objectives;
    Vec lo{kInfinity, kInfinity}, hi{-kInfinity, -kInfinity};
    auto grow = [&](const Vec& p, double pad) {
        lo[0] = std::min(lo[0], p[0] - pad);
        lo[1] = std::min(lo[1], p[1] - pad);
        hi[0] = std::max(hi[0], p[0] + pad);
        hi[1] = std::max(hi[1], p[1] + pad);
    };

    if (kind == "seb") {
        for (const Vec& p : parse_points(j, "points")) {
            if (p.size() != 2) throw InputError("levelset requires a 2D problem");
            objectives.push_back(detail::distance_objective(p));
            grow(p, 1.0);
        }
    } else if (kind == "seb-balls") {
        if (!j.contains("balls")) throw InputError("input needs \"balls\"");
        for (const auto& b : j["balls"]) {
            Vec c = parse_vec(b.at("center"), 2);
            objectives.push_back(detail::distance_objective(c, b.at("radius").get<double>()));
            grow(c, 1.0 + b.at("radius").get<double>());
        }
    } else if (kind == "seb-hyp") {
        for (const Vec& p : parse_points(j, "points")) {
            if (p.size() != 2 || norm(p) >= 1.0)
                throw InputError("hyperbolic points must be 2D inside the unit ball");
            QuasiconvexFunction q;
            q.dimension = 2;
            q.eval = [p](const Vec& x) {
                if (norm(x) >= 1.0 - 1e-12) return std::nan("");
                return hyperbolic_distance(x, p);
            };
            objectives.push_back(std::move(q));
        }
        lo = {-1.0, -1.0};
        hi = {1.0, 1.0};
    } else if (kind == "sight") {
        auto verts = parse_points(j, "vertices");
        std::size_t n = verts.size();
        for (std::size_t i = 0; i < n; ++i) {
            Vec u = verts[i], wv = verts[(i + 1) % n];
            QuasiconvexFunction q;
            q.dimension = 2;
            q.eval = [u, wv](const Vec& x) {
                if (distance(x, u) < 1e-12 || distance(x, wv) < 1e-12) return std::nan("");
                return complementary_angle(u, wv, x);
            };
            objectives.push_back(std::move(q));
            grow(u, 0.5);
        }
    } else if (kind == "angle") {
        Vec u = parse_vec(j.at("u"), 2), wv = parse_vec(j.at("w"), 2);
        QuasiconvexFunction q;
        q.dimension = 2;
        q.eval = [u, wv](const Vec& x) {
            if (distance(x, u) < 1e-12 || distance(x, wv) < 1e-12) return std::nan("");
            return complementary_angle(u, wv, x);
        };
        objectives.push_back(std::move(q));
        grow(u, 2.0);
        grow(wv, 2.0);
    } else {
        throw InputError("unknown levelset problem kind: " + kind);
    }

    if (!bounds_str.empty()) {
        std::stringstream ss(bounds_str);
        std::string tok;
        Vec b;
        while (std::getline(ss, tok, ',')) b.push_back(std::stod(tok));
        if (b.size() != 4) throw InputError("--bounds needs x0,x1,y0,y1");
        lo = {b[0], b[2]};
        hi = {b[1], b[3]};
    }
    if (!(lo[0] < hi[0] && lo[1] < hi[1])) throw InputError("degenerate levelset bounds");

    std::string out = "x,y,q\n";
    for (int i = 0; i < grid; ++i)
        for (int k = 0; k < grid; ++k) {
            double x = lo[0] + (hi[0] - lo[0]) * (i + 0.5) / grid;
            double y = lo[1] + (hi[1] - lo[1]) * (k + 0.5) / grid;
            double q = -kInfinity;
            for (const auto& f : objectives) {
                double v = f.eval({x, y});
                if (std::isnan(v) || !std::isfinite(v)) {
                    q = std::nan("");
                    break;
                }
                q = std::max(q, v);
            }
            char buf[128];
            if (std::isnan(q))
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,nan\n", x, y);
            else
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", x, y, q);
            out += buf;
        }
    std::fputs(out.c_str(), stdout);
    (void)cfg;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcprog: quasiconvex programming toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string input, target, bounds;
    int grid = 32;

    auto add_common = [&](CLI::App* sub, bool needs_input = true) {
        if (needs_input)
            sub->add_option("--input", input, "input file")->required();
        sub->add_option("--tolerance", cfg.tolerance, "solver tolerance")
            ->check(CLI::PositiveNumber);
        sub->add_option("--max-iterations", cfg.max_iterations, "iteration cap");
        sub->add_option("--seed", cfg.seed, "RNG seed")->each([&](const std::string&) {
            cfg.seed_given = true;
        });
        sub->add_option("--format", cfg.format, "output format: json or report")
            ->check(CLI::IsMember({"json", "report"}));
        sub->add_option("--jobs", cfg.jobs, "restart parallelism bound")
            ->check(CLI::PositiveNumber);
    };

    auto* seb = app.add_subcommand("seb", "smallest enclosing ball of points");
    add_common(seb);
    auto* seb_balls = app.add_subcommand("seb-balls", "smallest enclosing ball of balls");
    add_common(seb_balls);
    auto* seb_hyp = app.add_subcommand("seb-hyp", "hyperbolic smallest enclosing ball");
    add_common(seb_hyp);
    auto* sight = app.add_subcommand("sight", "sighting point of a star polygon");
    add_common(sight);
    auto* illum = app.add_subcommand("illum", "optimal illumination of a room");
    add_common(illum);
    auto* lip = app.add_subcommand("lip", "longest intersecting prefix");
    add_common(lip);
    auto* mesh = app.add_subcommand("mesh-smooth", "optimization-based mesh smoothing");
    add_common(mesh);
    auto* recur = app.add_subcommand("recurrence", "backtracking recurrence growth analysis");
    add_common(recur);
    recur->add_option("--target", target, "target vector, comma separated")->required();
    auto* level = app.add_subcommand("levelset", "sample the pointwise max objective on a grid");
    add_common(level);
    level->add_option("--grid", grid, "grid resolution per axis");
    level->add_option("--bounds", bounds, "x0,x1,y0,y1 sample window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (!cfg.seed_given) {
        if (const char* env = std::getenv("QCPROG_SEED")) {
            try {
                cfg.seed = std::stoull(env);
            } catch (...) {
                std::fputs("{\"error\":\"invalid QCPROG_SEED\",\"kind\":\"usage\"}\n", stderr);
                return 2;
            }
        }
    }

    try {
        if (seb->parsed()) return run_seb(input, cfg);
        if (seb_balls->parsed()) return run_seb_balls(input, cfg);
        if (seb_hyp->parsed()) return run_seb_hyp(input, cfg);
        if (sight->parsed()) return run_sight(input, cfg);
        if (illum->parsed()) return run_illum(input, cfg);
        if (lip->parsed()) return run_lip(input, cfg);
        if (mesh->parsed()) return run_mesh_smooth(input, cfg);
        if (recur->parsed()) return run_recurrence(input, target, cfg);
        if (level->parsed()) return run_levelset(input, grid, bounds, cfg);
    } catch (const std::exception& e) {
        qcprog::JsonWriter w;
        w.begin_object();
        w.key("error").value(std::string(e.what()));
        w.key("kind").value("infeasible-or-degenerate-input");
        w.end_object();
        std::fputs((w.str() + "\n").c_str(), stderr);
        return 1;
    }
    return 2;
}
