#include "config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "expr.hpp"

namespace fracperron {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void key_fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key \"" + key + "\": " + what);
}

double get_num(const json& j, const std::string& key, double fallback, bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!j[key].is_number()) key_fail(key, "expected a number");
    return j[key].get<double>();
}

std::string get_str(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) key_fail(key, "expected a string");
    return j[key].get<std::string>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) key_fail(key, "expected a boolean");
    return j[key].get<bool>();
}

void check_expr(const std::string& key, const std::string& text) {
    try {
        parse_expr(text);
    } catch (const ConfigError& e) {
        key_fail(key, e.what());
    }
}

void check_shape(const std::string& key, const std::string& text, int dim) {
    try {
        parse_shape(text, dim);
    } catch (const ConfigError& e) {
        key_fail(key, e.what());
    }
}

}  // namespace

FracParams ExperimentConfig::params() const {
    FracParams fp;
    fp.s = s;
    fp.p = p;
    fp.lambda = lambda;
    if (!kernel_expr.empty()) {
        auto e = parse_expr(kernel_expr);
        fp.kernel = [e](double r) { return e->eval({r, 0.0}, 1); };
    }
    fp.validate();
    return fp;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig cfg;
    cfg.task = get_str(j, "task", "");

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) key_fail("grid", "expected an object");
        cfg.dim = static_cast<int>(get_num(g, "dim", 1));
        if (cfg.dim != 1 && cfg.dim != 2) key_fail("grid.dim", "must be 1 or 2");
        if (!g.contains("box") || !g["box"].is_array() ||
            g["box"].size() != static_cast<std::size_t>(cfg.dim))
            key_fail("grid.box", "expected one [lo,hi] pair per axis");
        for (int a = 0; a < cfg.dim; ++a) {
            const auto& side = g["box"][a];
            if (!side.is_array() || side.size() != 2 || !side[0].is_number() ||
                !side[1].is_number())
                key_fail("grid.box", "expected [lo,hi] numbers");
            auto& range = a == 0 ? cfg.xrange : cfg.yrange;
            range = {side[0].get<double>(), side[1].get<double>()};
        }
        cfg.h = get_num(g, "h", 0.0);
        if (g.contains("cells")) {
            if (!g["cells"].is_array()) key_fail("grid.cells", "expected an array of counts");
            for (const auto& c : g["cells"]) {
                if (!c.is_number_integer() || c.get<int>() < 1)
                    key_fail("grid.cells", "expected positive integers");
                cfg.cells_family.push_back(c.get<int>());
            }
        }
        cfg.max_nodes = static_cast<std::int64_t>(
            get_num(g, "max_nodes", static_cast<double>(Grid::kDefaultMaxNodes)));
        if (cfg.h <= 0.0 && cfg.cells_family.empty())
            key_fail("grid.h", "either h or cells must be given");
    } else {
        key_fail("grid", "missing");
    }

    if (j.contains("params")) {
        const auto& p = j["params"];
        if (!p.is_object()) key_fail("params", "expected an object");
        cfg.s = get_num(p, "s", cfg.s);
        cfg.p = get_num(p, "p", cfg.p);
        cfg.lambda = get_num(p, "lambda", cfg.lambda);
        const std::string kernel = get_str(p, "kernel", "standard");
        if (kernel != "standard") {
            check_expr("params.kernel", kernel);
            cfg.kernel_expr = kernel;
        }
        try {
            cfg.params();
        } catch (const ConfigError& e) {
            key_fail("params", e.what());
        }
    }

    cfg.omega_spec = get_str(j, "omega", cfg.omega_spec);
    check_shape("omega", cfg.omega_spec, cfg.dim);

    if (j.contains("data")) {
        const auto& d = j["data"];
        if (!d.is_object()) key_fail("data", "expected an object");
        cfg.g_expr = get_str(d, "g", cfg.g_expr);
        check_expr("data.g", cfg.g_expr);
        cfg.g_far = get_num(d, "g_far", cfg.g_far);
        if (d.contains("psi")) {
            cfg.psi_expr = get_str(d, "psi", "");
            check_expr("data.psi", *cfg.psi_expr);
        }
        cfg.pert_height = get_num(d, "pert_height", cfg.pert_height);
        cfg.observe_margin = get_num(d, "observe_margin", cfg.observe_margin);
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        if (!s.is_object()) key_fail("solver", "expected an object");
        cfg.solver.tol = get_num(s, "tol", cfg.solver.tol);
        cfg.solver.max_sweeps = static_cast<long>(get_num(s, "max_sweeps", 0.0));
        cfg.solver.act_tol = get_num(s, "act_tol", cfg.solver.act_tol);
        cfg.solver.red_black = get_bool(s, "red_black", cfg.solver.red_black);
    }
    cfg.regularity.solver = cfg.solver;

    if (j.contains("capacity")) {
        const auto& c = j["capacity"];
        if (!c.is_object()) key_fail("capacity", "expected an object");
        cfg.capacity_kind = get_str(c, "kind", cfg.capacity_kind);
        if (cfg.capacity_kind != "condenser" && cfg.capacity_kind != "sobolev")
            key_fail("capacity.kind", "must be condenser or sobolev");
        cfg.compact_spec = get_str(c, "K", "");
        if (!cfg.compact_spec.empty()) check_shape("capacity.K", cfg.compact_spec, cfg.dim);
        cfg.exceptional_spec = get_str(c, "E", "");
        if (!cfg.exceptional_spec.empty())
            check_shape("capacity.E", cfg.exceptional_spec, cfg.dim);
        cfg.dump_minimizer = get_bool(c, "dump_minimizer", false);
    }

    if (j.contains("regularity")) {
        const auto& r = j["regularity"];
        if (!r.is_object()) key_fail("regularity", "expected an object");
        cfg.regularity.r0 = get_num(r, "r0", cfg.regularity.r0);
        cfg.regularity.levels = static_cast<int>(get_num(r, "levels", cfg.regularity.levels));
        if (cfg.regularity.levels < 0) key_fail("regularity.levels", "must be nonnegative");
        cfg.regularity.barrier_tol = get_num(r, "barrier_tol", cfg.regularity.barrier_tol);
        cfg.regularity.pot_tol = get_num(r, "pot_tol", cfg.regularity.pot_tol);
        cfg.regularity.potential_radius_cells =
            get_num(r, "potential_radius_cells", cfg.regularity.potential_radius_cells);
    }

    if (j.contains("points")) {
        if (!j["points"].is_array()) key_fail("points", "expected an array of coordinates");
        for (const auto& pt : j["points"]) {
            if (!pt.is_array() || pt.size() != static_cast<std::size_t>(cfg.dim))
                key_fail("points", "each point needs one coordinate per axis");
            Point q{pt[0].get<double>(), 0.0};
            if (cfg.dim == 2) q[1] = pt[1].get<double>();
            cfg.points.push_back(q);
        }
    }
    cfg.all_boundary = get_bool(j, "all_boundary", false);

    if (j.contains("perturbation")) {
        const auto& p = j["perturbation"];
        if (!p.is_object()) key_fail("perturbation", "expected an object");
        if (p.contains("sets")) {
            if (!p["sets"].is_array()) key_fail("perturbation.sets", "expected shape specs");
            for (const auto& s : p["sets"]) {
                if (!s.is_string()) key_fail("perturbation.sets", "expected shape spec strings");
                check_shape("perturbation.sets", s.get<std::string>(), cfg.dim);
                cfg.perturbation_sets.push_back(s.get<std::string>());
            }
        }
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) key_fail("output", "expected an object");
        cfg.out_dir = get_str(o, "dir", cfg.out_dir);
    }
    cfg.jobs = static_cast<int>(get_num(j, "jobs", 1));
    if (cfg.jobs < 1) key_fail("jobs", "must be at least 1");
    cfg.dump_weights = get_bool(j, "dump_weights", false);
    cfg.dump_residual = get_bool(j, "dump_residual", false);

    const std::vector<std::string> tasks = {"solve",    "obstacle", "capacity",     "wiener",
                                            "classify", "perron",   "perturbation", "kellogg"};
    if (!cfg.task.empty() && std::find(tasks.begin(), tasks.end(), cfg.task) == tasks.end())
        key_fail("task", "unknown task \"" + cfg.task + "\"");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string print_config(const ExperimentConfig& cfg) {
    json j;
    if (!cfg.task.empty()) j["task"] = cfg.task;
    json grid;
    grid["dim"] = cfg.dim;
    grid["box"] = json::array();
    grid["box"].push_back({cfg.xrange[0], cfg.xrange[1]});
    if (cfg.dim == 2) grid["box"].push_back({cfg.yrange[0], cfg.yrange[1]});
    if (cfg.h > 0.0) grid["h"] = cfg.h;
    if (!cfg.cells_family.empty()) grid["cells"] = cfg.cells_family;
    grid["max_nodes"] = cfg.max_nodes;
    j["grid"] = std::move(grid);

    json params;
    params["s"] = cfg.s;
    params["p"] = cfg.p;
    params["lambda"] = cfg.lambda;
    params["kernel"] = cfg.kernel_expr.empty() ? "standard" : cfg.kernel_expr;
    j["params"] = std::move(params);

    j["omega"] = cfg.omega_spec;

    json data;
    data["g"] = cfg.g_expr;
    data["g_far"] = cfg.g_far;
    if (cfg.psi_expr) data["psi"] = *cfg.psi_expr;
    data["pert_height"] = cfg.pert_height;
    data["observe_margin"] = cfg.observe_margin;
    j["data"] = std::move(data);

    json solver;
    solver["tol"] = cfg.solver.tol;
    solver["max_sweeps"] = cfg.solver.max_sweeps;
    solver["act_tol"] = cfg.solver.act_tol;
    solver["red_black"] = cfg.solver.red_black;
    j["solver"] = std::move(solver);

    json capacity;
    capacity["kind"] = cfg.capacity_kind;
    if (!cfg.compact_spec.empty()) capacity["K"] = cfg.compact_spec;
    if (!cfg.exceptional_spec.empty()) capacity["E"] = cfg.exceptional_spec;
    capacity["dump_minimizer"] = cfg.dump_minimizer;
    j["capacity"] = std::move(capacity);

    json reg;
    reg["r0"] = cfg.regularity.r0;
    reg["levels"] = cfg.regularity.levels;
    reg["barrier_tol"] = cfg.regularity.barrier_tol;
    reg["pot_tol"] = cfg.regularity.pot_tol;
    reg["potential_radius_cells"] = cfg.regularity.potential_radius_cells;
    j["regularity"] = std::move(reg);

    if (!cfg.points.empty()) {
        json pts = json::array();
        for (const auto& q : cfg.points) {
            json one = json::array();
            one.push_back(q[0]);
            if (cfg.dim == 2) one.push_back(q[1]);
            pts.push_back(std::move(one));
        }
        j["points"] = std::move(pts);
    }
    j["all_boundary"] = cfg.all_boundary;

    if (!cfg.perturbation_sets.empty()) j["perturbation"] = {{"sets", cfg.perturbation_sets}};

    j["output"] = {{"dir", cfg.out_dir}};
    j["jobs"] = cfg.jobs;
    j["dump_weights"] = cfg.dump_weights;
    j["dump_residual"] = cfg.dump_residual;
    return j.dump(2) + "\n";
}

}  // namespace fracperron
