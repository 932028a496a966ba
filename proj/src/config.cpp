#include "volgeo/config.hpp"

#include "volgeo/io.hpp"
#include "volgeo/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace volgeo {

namespace {

using nlohmann::json;
using std::numbers::pi;

void reject_unknown_keys(const json& doc, const json& reference, const std::string& where)
{
    if (!doc.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!reference.contains(key)) {
            throw ConfigError("unknown key " + where + "." + key);
        }
    }
}

template <typename T>
T get(const json& block, const char* key, const std::string& where)
{
    try {
        return block.at(key).get<T>();
    }
    catch (const json::exception&) {
        throw ConfigError(where + "." + key + " is missing or has the wrong type");
    }
}

std::string type_of(const json& family, const char* what)
{
    if (!family.is_object() || !family.contains("type") || !family["type"].is_string()) {
        throw ConfigError(std::string(what) + " needs a string \"type\"");
    }
    return family["type"].get<std::string>();
}

double number(const json& family, const char* key, double fallback)
{
    if (!family.contains(key)) {
        return fallback;
    }
    if (!family[key].is_number()) {
        throw ConfigError(std::string("\"") + key + "\" must be a number");
    }
    return family[key].get<double>();
}

// Periodic distance on a circle of length L.
double wrap_distance(double x, double c, double L)
{
    double d = std::fmod(std::abs(x - c), L);
    return std::min(d, L - d);
}

}  // namespace

bool RunConfig::wants(const std::string& format) const
{
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

json default_config()
{
    return json::parse(R"({
  "geometry": {"dim": 1, "length": 1.0, "nx": 128, "nt": 65, "phi": {"type": "flat"}},
  "problem": {
    "a": {"type": "constant", "value": 1.0},
    "b": 0.0,
    "mode": "epsilon-ladder",
    "f": {"type": "constant", "value": 0.01},
    "u0": {"type": "zero"},
    "u1": {"type": "sine", "amplitude": 0.02, "k": 1}
  },
  "solver": {
    "newton_tol": 1e-10,
    "max_newton_iters": 50,
    "backtrack_factor": 0.5,
    "max_halvings": 30,
    "admissibility_floor": 1e-12,
    "linear_tol": 1e-12,
    "linear_solver": "sparse-lu",
    "epsilon0": 0.1,
    "ratio": 0.1,
    "epsilon_min": 1e-4,
    "bulge": null
  },
  "diagnostics": {"A": 0.0},
  "verify": {"samples": 100000, "seed": 20180723, "slope_min": 1.7, "slope_max": 2.3},
  "output": {"directory": "out", "formats": ["csv", "json", "field"]}
})");
}

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must look like key.path=value: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    }
    catch (const json::exception&) {
        value = text;
    }
    std::string pointer = "/" + path;
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    try {
        doc[json::json_pointer(pointer)] = value;
    }
    catch (const json::exception& e) {
        throw ConfigError("cannot apply override " + assignment + ": " + e.what());
    }
}

RunConfig parse_run_config(const json& user, const std::vector<std::string>& overrides)
{
    const json defaults = default_config();
    json doc = defaults;
    if (!user.is_null()) {
        reject_unknown_keys(user, defaults, "config");
        for (const auto& [block, value] : user.items()) {
            reject_unknown_keys(value, defaults[block], block);
        }
        doc.merge_patch(user);
    }
    for (const auto& o : overrides) {
        apply_override(doc, o);
    }
    reject_unknown_keys(doc, defaults, "config");
    for (const auto& [block, value] : doc.items()) {
        reject_unknown_keys(value, defaults[block], block);
    }

    RunConfig cfg;
    cfg.document = doc;
    const json& geo = doc["geometry"];
    try {
        cfg.grid = SpaceTimeGrid(get<int>(geo, "dim", "geometry"), get<int>(geo, "nx", "geometry"),
                                 get<int>(geo, "nt", "geometry"),
                                 get<double>(geo, "length", "geometry"));
    }
    catch (const ConfigError&) {
        throw;
    }
    catch (const Error& e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }

    const json& prob = doc["problem"];
    const std::string mode = get<std::string>(prob, "mode", "problem");
    if (mode == "epsilon-ladder") {
        cfg.mode = ProblemMode::EpsilonLadder;
    }
    else if (mode == "fixed-f") {
        cfg.mode = ProblemMode::FixedF;
    }
    else if (mode == "degenerate-f") {
        cfg.mode = ProblemMode::DegenerateF;
    }
    else {
        throw ConfigError("problem.mode must be epsilon-ladder, fixed-f or degenerate-f");
    }
    get<double>(prob, "b", "problem");

    const json& sol = doc["solver"];
    SolverConfig& s = cfg.solver;
    s.newton_tol = get<double>(sol, "newton_tol", "solver");
    s.max_newton_iters = get<int>(sol, "max_newton_iters", "solver");
    s.backtrack_factor = get<double>(sol, "backtrack_factor", "solver");
    s.max_halvings = get<int>(sol, "max_halvings", "solver");
    s.admissibility_floor = get<double>(sol, "admissibility_floor", "solver");
    s.linear_tol = get<double>(sol, "linear_tol", "solver");
    const std::string linear = get<std::string>(sol, "linear_solver", "solver");
    if (linear == "sparse-lu") {
        s.linear_solver = LinearSolverKind::SparseLU;
    }
    else if (linear == "bicgstab") {
        s.linear_solver = LinearSolverKind::BiCGSTAB;
    }
    else {
        throw ConfigError("solver.linear_solver must be sparse-lu or bicgstab");
    }
    s.epsilon0 = get<double>(sol, "epsilon0", "solver");
    s.ratio = get<double>(sol, "ratio", "solver");
    s.epsilon_min = get<double>(sol, "epsilon_min", "solver");
    if (!sol["bulge"].is_null()) {
        s.bulge = get<double>(sol, "bulge", "solver");
    }
    try {
        s.validate();
    }
    catch (const Error& e) {
        throw ConfigError(e.what());
    }

    cfg.diagnostics.A = get<double>(doc["diagnostics"], "A", "diagnostics");
    cfg.verify.concavity_samples = get<Index>(doc["verify"], "samples", "verify");
    cfg.verify.seed = get<std::uint64_t>(doc["verify"], "seed", "verify");
    cfg.verify.slope_min = get<double>(doc["verify"], "slope_min", "verify");
    cfg.verify.slope_max = get<double>(doc["verify"], "slope_max", "verify");
    if (cfg.verify.concavity_samples <= 0) {
        throw ConfigError("verify.samples must be positive");
    }
    if (!(cfg.verify.slope_min < cfg.verify.slope_max)) {
        throw ConfigError("verify.slope_min must be below verify.slope_max");
    }

    cfg.output_dir = get<std::string>(doc["output"], "directory", "output");
    cfg.formats = get<std::vector<std::string>>(doc["output"], "formats", "output");
    for (const auto& f : cfg.formats) {
        if (f != "csv" && f != "json" && f != "field") {
            throw ConfigError("unknown output format " + f);
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides)
{
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config " + path.string());
    }
    json user;
    try {
        user = json::parse(is);
    }
    catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_run_config(user, overrides);
}

Metric build_metric(const RunConfig& cfg)
{
    const json& family = cfg.document["geometry"]["phi"];
    const std::string type = type_of(family, "geometry.phi");
    const SpatialGrid& g = cfg.grid.space;
    if (type == "flat") {
        return Metric(g);
    }
    if (type == "cos-bump") {
        if (g.dim != 2) {
            throw ConfigError("a conformal factor needs dim 2");
        }
        const double amplitude = number(family, "amplitude", 0.1);
        const int frequency = int(number(family, "frequency", 1));
        return Metric(g, manufactured::cos_bump_phi(g, amplitude, frequency));
    }
    throw ConfigError("geometry.phi.type must be flat or cos-bump");
}

SpatialField build_spatial(const json& family, const SpatialGrid& g, const char* what)
{
    const std::string type = type_of(family, what);
    const double L = g.length;
    if (type == "zero") {
        return SpatialField(g, 0.0);
    }
    if (type == "constant") {
        return SpatialField(g, number(family, "value", 0.0));
    }
    if (type == "sine") {
        const double amp = number(family, "amplitude", 0.0);
        const double k = number(family, "k", 1.0);
        return SpatialField::sample(g, [&](double x, double) { return amp * std::sin(2 * pi * k * x / L); });
    }
    if (type == "cos") {
        const double mean = number(family, "mean", 0.0);
        const double amp = number(family, "amplitude", 0.0);
        const double k = number(family, "k", 1.0);
        return SpatialField::sample(
            g, [&](double x, double) { return mean + amp * std::cos(2 * pi * k * x / L); });
    }
    if (type == "bump") {
        const double width = number(family, "width", 0.1 * L);
        const double height = number(family, "height", 0.0);
        if (!(width > 0.0)) {
            throw ConfigError(std::string(what) + ": bump width must be positive");
        }
        double cx = 0.5 * L;
        double cy = 0.5 * L;
        if (family.contains("center")) {
            const json& c = family["center"];
            if (c.is_number()) {
                cx = cy = c.get<double>();
            }
            else if (c.is_array() && c.size() == 2) {
                cx = c[0].get<double>();
                cy = c[1].get<double>();
            }
            else {
                throw ConfigError(std::string(what) + ": center must be a number or [x, y]");
            }
        }
        return SpatialField::sample(g, [&](double x, double y) {
            double r2 = std::pow(wrap_distance(x, cx, L), 2);
            if (g.dim == 2) {
                r2 += std::pow(wrap_distance(y, cy, L), 2);
            }
            return height * std::exp(-r2 / (2.0 * width * width));
        });
    }
    if (type == "manufactured") {
        if (g.dim != 1 || g.length != 1.0) {
            throw ConfigError(std::string(what) + ": manufactured data live on the unit circle");
        }
        const manufactured::SineSolution ms{number(family, "amplitude", 0.01)};
        const double t = number(family, "t", 0.0);
        return SpatialField::sample(g, [&](double x, double) { return ms.u(x, t); });
    }
    if (type == "file") {
        if (!family.contains("path") || !family["path"].is_string()) {
            throw ConfigError(std::string(what) + ": file needs a path");
        }
        SpatialField f = read_spatial_field(family["path"].get<std::string>());
        if (!(f.grid == g)) {
            throw ConfigError(std::string(what) + ": file grid does not match the configured grid");
        }
        return f;
    }
    throw ConfigError(std::string(what) + ": unknown family " + type);
}

Field build_f(const RunConfig& cfg)
{
    const json& family = cfg.document["problem"]["f"];
    const std::string type = type_of(family, "problem.f");
    const SpaceTimeGrid& g = cfg.grid;
    const double L = g.space.length;
    if (type == "constant") {
        return Field(g, number(family, "value", 0.0));
    }
    if (type == "one-minus-cos-squared") {
        const double amp = number(family, "amplitude", 1.0);
        const double k = number(family, "k", 1.0);
        return Field::sample(g, [&](double x, double, double) {
            const double c = 1.0 - std::cos(2 * pi * k * x / L);
            return amp * c * c;
        });
    }
    if (type == "sine-cubed-positive") {
        const double amp = number(family, "amplitude", 1.0);
        return Field::sample(g, [&](double x, double, double) {
            return amp * std::pow(std::max(0.0, std::sin(2 * pi * x / L)), 3);
        });
    }
    if (type == "manufactured") {
        if (g.dim() != 1 || L != 1.0) {
            throw ConfigError("problem.f: manufactured data live on the unit circle");
        }
        return manufactured::SineSolution{number(family, "amplitude", 0.01)}.sample_f(g);
    }
    if (type == "file") {
        if (!family.contains("path") || !family["path"].is_string()) {
            throw ConfigError("problem.f: file needs a path");
        }
        Field f = read_field(family["path"].get<std::string>());
        if (!(f.grid == g)) {
            throw ConfigError("problem.f: file grid does not match the configured grid");
        }
        return f;
    }
    throw ConfigError("problem.f: unknown family " + type);
}

ProblemData build_problem(const RunConfig& cfg)
{
    const json& prob = cfg.document["problem"];
    const SpatialGrid& g = cfg.grid.space;
    const Metric metric = build_metric(cfg);
    SpatialField a = build_spatial(prob["a"], g, "problem.a");
    SpatialField u0 = build_spatial(prob["u0"], g, "problem.u0");
    SpatialField u1 = build_spatial(prob["u1"], g, "problem.u1");
    const double b = prob["b"].get<double>();

    Target target = Target::constant(cfg.solver.epsilon0);
    if (cfg.mode == ProblemMode::FixedF) {
        target = Target::field(build_f(cfg), 0.0);
    }
    else if (cfg.mode == ProblemMode::DegenerateF) {
        target = Target::field(build_f(cfg), cfg.solver.epsilon0);
    }

    ProblemData p(cfg.grid, metric, std::move(a), b, std::move(target), std::move(u0),
                  std::move(u1));
    try {
        p.validate();
    }
    catch (const InvalidProblem& e) {
        throw ConfigError(e.what());
    }
    return p;
}

}  // namespace volgeo
