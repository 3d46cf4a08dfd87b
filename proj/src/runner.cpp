#include "runner.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>

#include "expr.hpp"
#include "perron.hpp"

namespace fracperron {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write output file \"" + path.string() + "\"");
        out << content;
    }
    fs::rename(tmp, path);
}

std::string field_csv(const Field& f) {
    const auto& grid = *f.grid;
    std::string out = grid.dim() == 1 ? "index,x,value\n" : "index,x,y,value\n";
    for (int i = 0; i < grid.size(); ++i) {
        const Point c = grid.coord(i);
        out += std::to_string(i) + "," + format_double(c[0]);
        if (grid.dim() == 2) out += "," + format_double(c[1]);
        out += "," + format_double(f.values[i]) + "\n";
    }
    return out;
}

json report_json(const SolveReport& rep, const NodeSet& omega) {
    json j;
    j["iterations"] = rep.iterations;
    j["final_sweep_delta"] = rep.final_sweep_delta;
    j["energy"] = rep.energy;
    j["residual_sup"] = rep.residual_sup;
    j["converged"] = rep.converged;
    j["interior_nodes"] = omega.count();
    j["active_set"] = rep.active_set.indices();
    j["units"] = "lengths in box units; weights carry length^(n-sp); energies dimensionless";
    return j;
}

struct Problem {
    GridPtr grid;
    WeightsPtr weights;
    NodeSet omega;
    ShapePtr omega_shape;
    FracParams params;
};

Problem setup(const ExperimentConfig& cfg, double h) {
    Problem pr;
    pr.params = cfg.params();
    pr.grid = build_grid(cfg.dim, cfg.xrange, cfg.yrange, h, cfg.max_nodes);
    pr.weights = assemble_weights(pr.grid, pr.params);
    pr.omega_shape = parse_shape(cfg.omega_spec, cfg.dim);
    pr.omega = rasterize(*pr.omega_shape, pr.grid);
    return pr;
}

double primary_h(const ExperimentConfig& cfg) {
    if (cfg.h > 0.0) return cfg.h;
    return (cfg.xrange[1] - cfg.xrange[0]) / cfg.cells_family.front();
}

void dump_common(const ExperimentConfig& cfg, const Problem& pr, const Field& u) {
    if (cfg.dump_weights) {
        std::string csv = "i,j,w\n";
        for (int i = 0; i < pr.weights->size(); ++i) {
            for (int j = i + 1; j < pr.weights->size(); ++j)
                csv += std::to_string(i) + "," + std::to_string(j) + "," +
                       format_double(pr.weights->w(i, j)) + "\n";
            csv += std::to_string(i) + ",-1," + format_double(pr.weights->c_far(i)) + "\n";
        }
        atomic_write(fs::path(cfg.out_dir) / "weights.csv", csv);
    }
    if (cfg.dump_residual) {
        const auto res = apply_operator(u, *pr.weights, pr.omega);
        const auto& grid = *pr.grid;
        std::string csv = grid.dim() == 1 ? "index,x,r\n" : "index,x,y,r\n";
        for (int i : pr.omega.indices()) {
            const Point c = grid.coord(i);
            csv += std::to_string(i) + "," + format_double(c[0]);
            if (grid.dim() == 2) csv += "," + format_double(c[1]);
            csv += "," + format_double(res.r[i]) + "\n";
        }
        atomic_write(fs::path(cfg.out_dir) / "residual.csv", csv);
    }
}

Field eval_data(const ExperimentConfig& cfg, const std::string& expr_text, double far,
                const GridPtr& grid, const char* key) {
    try {
        return eval_field(*parse_expr(expr_text), grid, far);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
    }
}

void run_solve(const ExperimentConfig& cfg, bool with_obstacle) {
    const Problem pr = setup(cfg, primary_h(cfg));
    if (pr.omega.empty()) throw ConfigError("config key \"omega\": rasterizes to no nodes");
    const Field g = eval_data(cfg, cfg.g_expr, cfg.g_far, pr.grid, "data.g");
    SolveReport rep;
    if (with_obstacle) {
        ObstacleSpec spec;
        spec.g = g;
        if (cfg.psi_expr)
            spec.psi = eval_data(cfg, *cfg.psi_expr, 0.0, pr.grid, "data.psi");
        rep = solve_obstacle(spec, pr.omega, *pr.weights, cfg.solver);
    } else {
        rep = solve_dirichlet(g, pr.omega, *pr.weights, cfg.solver);
    }
    atomic_write(fs::path(cfg.out_dir) / "report.json", report_json(rep, pr.omega).dump(2) + "\n");
    atomic_write(fs::path(cfg.out_dir) / "field.csv", field_csv(rep.u));
    dump_common(cfg, pr, rep.u);
}

void run_capacity(const ExperimentConfig& cfg) {
    const Problem pr = setup(cfg, primary_h(cfg));
    CapacityResult result;
    if (cfg.capacity_kind == "condenser") {
        if (cfg.compact_spec.empty())
            throw ConfigError("config key \"capacity.K\": required for the condenser capacity");
        const auto K = rasterize(cfg.compact_spec, pr.grid, SetRole::Compact);
        result = condenser_capacity(K, pr.omega, pr.params, *pr.weights, cfg.solver);
    } else {
        if (cfg.exceptional_spec.empty())
            throw ConfigError("config key \"capacity.E\": required for the sobolev capacity");
        const auto E = rasterize(cfg.exceptional_spec, pr.grid, SetRole::Exceptional);
        result = sobolev_capacity(E, pr.params, *pr.weights, cfg.solver);
    }
    json j;
    j["value"] = result.value;
    j["kind"] = cfg.capacity_kind;
    j["converged"] = result.converged;
    atomic_write(fs::path(cfg.out_dir) / "capacity.json", j.dump(2) + "\n");
    if (cfg.dump_minimizer)
        atomic_write(fs::path(cfg.out_dir) / "minimizer.csv", field_csv(result.minimizer));
}

void run_wiener(const ExperimentConfig& cfg) {
    if (cfg.points.empty()) throw ConfigError("config key \"points\": wiener needs x0");
    const Problem pr = setup(cfg, primary_h(cfg));
    const Point x0 = cfg.points.front();
    double r0 = cfg.regularity.r0;
    if (r0 <= 0.0) {
        double m = std::min(x0[0] - pr.grid->lo(0), pr.grid->hi(0) - x0[0]);
        if (cfg.dim == 2) m = std::min({m, x0[1] - pr.grid->lo(1), pr.grid->hi(1) - x0[1]});
        r0 = 0.5 * m;
    }
    const auto profile = wiener_profile(x0, *pr.omega_shape, cfg.dim, pr.params, r0,
                                        cfg.regularity.levels, cfg.regularity);
    if (profile.levels() == 0) throw ResolutionError("wiener profile unresolvable at level 0");
    std::string csv = "j,rho,cap,term,partial_sum\n";
    for (int j = 0; j < profile.levels(); ++j)
        csv += std::to_string(j) + "," + format_double(profile.radii[j]) + "," +
               format_double(profile.caps[j]) + "," + format_double(profile.terms[j]) + "," +
               format_double(profile.partial_sums[j]) + "\n";
    atomic_write(fs::path(cfg.out_dir) / "profile.csv", csv);
    json j;
    j["x0"] = cfg.dim == 2 ? json::array({x0[0], x0[1]}) : json::array({x0[0]});
    j["r0"] = r0;
    j["levels"] = profile.levels();
    j["truncated"] = profile.resolution_flag;
    j["last_term"] = profile.terms.back();
    j["partial_sum"] = profile.partial_sums.back();
    atomic_write(fs::path(cfg.out_dir) / "wiener.json", j.dump(2) + "\n");
    if (profile.resolution_flag) throw ResolutionError("wiener profile truncated by resolution");
}

json verdict_json(const Point& x0, int dim, const RegularityVerdict& v) {
    json j;
    j["x0"] = dim == 2 ? json::array({x0[0], x0[1]}) : json::array({x0[0]});
    switch (v.verdict) {
        case Verdict::Regular: j["verdict"] = "regular"; break;
        case Verdict::Irregular: j["verdict"] = "irregular"; break;
        case Verdict::Inconclusive: j["verdict"] = "inconclusive"; break;
    }
    j["wiener_vote"] = v.wiener_vote;
    j["wiener_first_term"] = v.wiener_first_term;
    j["wiener_last_term"] = v.wiener_last_term;
    j["wiener_median_term"] = v.wiener_median_term;
    j["barrier_vote"] = v.barrier_vote;
    j["barrier_max_near"] = v.barrier_max_near;
    j["barrier_rescale"] = v.barrier_rescale;
    j["potential_vote"] = v.potential_vote;
    j["potential_min_near"] = v.potential_min_near;
    j["resolution_flag"] = v.resolution_flag;
    j["notes"] = v.notes;
    return j;
}

std::vector<Point> boundary_points(const Problem& pr) {
    // exterior nodes adjacent to omega (cell-center designations)
    std::vector<Point> out;
    const auto& grid = *pr.grid;
    const int nx = grid.count(0);
    const int ny = grid.dim() == 2 ? grid.count(1) : 1;
    auto in_omega = [&](int ix, int iy) {
        if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return false;
        return pr.omega.contains(iy * nx + ix);
    };
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            if (in_omega(ix, iy)) continue;
            const bool adjacent = in_omega(ix - 1, iy) || in_omega(ix + 1, iy) ||
                                  (grid.dim() == 2 &&
                                   (in_omega(ix, iy - 1) || in_omega(ix, iy + 1)));
            if (adjacent) out.push_back(grid.coord(iy * nx + ix));
        }
    return out;
}

void run_classify(const ExperimentConfig& cfg) {
    const Problem pr = setup(cfg, primary_h(cfg));
    std::vector<Point> points = cfg.points;
    if (cfg.all_boundary) {
        const auto extra = boundary_points(pr);
        points.insert(points.end(), extra.begin(), extra.end());
    }
    if (points.empty()) throw ConfigError("config key \"points\": nothing to classify");

    std::vector<RegularityVerdict> verdicts(points.size());
    const int jobs = std::max(1, cfg.jobs);
    std::vector<std::future<void>> tasks;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= points.size()) return;
            verdicts[k] = classify(points[k], *pr.omega_shape, pr.grid, *pr.weights, pr.params,
                                   cfg.regularity);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        for (int t = 0; t < jobs; ++t) tasks.push_back(std::async(std::launch::async, worker));
        for (auto& t : tasks) t.get();
    }

    json all = json::array();
    for (std::size_t k = 0; k < points.size(); ++k)
        all.push_back(verdict_json(points[k], cfg.dim, verdicts[k]));
    atomic_write(fs::path(cfg.out_dir) / "verdicts.json", all.dump(2) + "\n");

    std::string csv = cfg.dim == 1 ? "x,verdict\n" : "x,y,verdict\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
        csv += format_double(points[k][0]);
        if (cfg.dim == 2) csv += "," + format_double(points[k][1]);
        const char* name = verdicts[k].verdict == Verdict::Regular      ? "regular"
                           : verdicts[k].verdict == Verdict::Irregular ? "irregular"
                                                                       : "inconclusive";
        csv += std::string(",") + name + "\n";
    }
    atomic_write(fs::path(cfg.out_dir) / "verdicts.csv", csv);
}

void run_perron(const ExperimentConfig& cfg) {
    const Problem pr = setup(cfg, primary_h(cfg));
    if (pr.omega.empty()) throw ConfigError("config key \"omega\": rasterizes to no nodes");
    const Field g = eval_data(cfg, cfg.g_expr, cfg.g_far, pr.grid, "data.g");
    const auto rep = upper_perron(g, pr.omega, *pr.weights, cfg.solver);
    json j;
    j["gap_sup"] = rep.gap_sup;
    j["dev_sup"] = rep.dev_sup;
    j["passes"] = rep.passes;
    j["converged"] = rep.converged;
    atomic_write(fs::path(cfg.out_dir) / "perron.json", j.dump(2) + "\n");
    atomic_write(fs::path(cfg.out_dir) / "upper.csv", field_csv(rep.upper));
    atomic_write(fs::path(cfg.out_dir) / "lower.csv", field_csv(rep.lower));
    atomic_write(fs::path(cfg.out_dir) / "hg.csv", field_csv(rep.hg));
}

void run_perturbation(const ExperimentConfig& cfg) {
    if (cfg.cells_family.empty())
        throw ConfigError("config key \"grid.cells\": perturbation needs a refinement family");
    if (cfg.perturbation_sets.empty())
        throw ConfigError("config key \"perturbation.sets\": at least one set required");
    std::string csv = "k,h,set,capacity,deviation\n";
    std::vector<double> caps, devs;
    int k = 0;
    json rows = json::array();
    for (int cells : cfg.cells_family) {
        const double h = (cfg.xrange[1] - cfg.xrange[0]) / cells;
        const Problem pr = setup(cfg, h);
        for (std::size_t si = 0; si < cfg.perturbation_sets.size(); ++si) {
            PerturbationCase pc;
            pc.grid = pr.grid;
            pc.weights = pr.weights;
            pc.omega = pr.omega;
            pc.g = eval_data(cfg, cfg.g_expr, cfg.g_far, pr.grid, "data.g");
            pc.perturbed_set =
                rasterize(cfg.perturbation_sets[si], pr.grid, SetRole::Exceptional);
            pc.pert_height = cfg.pert_height;
            pc.observe_margin = cfg.observe_margin;
            const auto row = perturbation_row(pc, pr.params, cfg.solver);
            csv += std::to_string(k) + "," + format_double(row.h) + "," +
                   cfg.perturbation_sets[si] + "," + format_double(row.capacity) + "," +
                   format_double(row.deviation) + "\n";
            caps.push_back(row.capacity);
            devs.push_back(row.deviation);
            json r;
            r["k"] = k;
            r["h"] = row.h;
            r["set"] = cfg.perturbation_sets[si];
            r["capacity"] = row.capacity;
            r["deviation"] = row.deviation;
            rows.push_back(std::move(r));
            ++k;
        }
    }
    atomic_write(fs::path(cfg.out_dir) / "perturbation.csv", csv);
    json j;
    j["rows"] = std::move(rows);
    if (caps.size() >= 2) j["spearman_capacity_deviation"] = spearman_rho(caps, devs);
    atomic_write(fs::path(cfg.out_dir) / "perturbation.json", j.dump(2) + "\n");
}

void run_kellogg(const ExperimentConfig& cfg) {
    if (cfg.cells_family.empty())
        throw ConfigError("config key \"grid.cells\": kellogg needs a refinement family");
    if (cfg.points.empty() && !cfg.all_boundary)
        throw ConfigError("config key \"points\": kellogg needs boundary sample points");
    const auto shape = parse_shape(cfg.omega_spec, cfg.dim);
    const auto params = cfg.params();
    std::string csv = "h,tested,irregular,inconclusive,irregular_capacity\n";
    json rows = json::array();
    for (int cells : cfg.cells_family) {
        const double h = (cfg.xrange[1] - cfg.xrange[0]) / cells;
        auto grid = build_grid(cfg.dim, cfg.xrange, cfg.yrange, h, cfg.max_nodes);
        std::vector<Point> points = cfg.points;
        if (cfg.all_boundary) {
            Problem pr;
            pr.grid = grid;
            pr.omega = rasterize(*shape, grid);
            const auto extra = boundary_points(pr);
            points.insert(points.end(), extra.begin(), extra.end());
        }
        const auto row = kellogg_row(*shape, points, grid, params, cfg.regularity);
        csv += format_double(row.h) + "," + std::to_string(row.tested.size()) + "," +
               std::to_string(row.irregular.size()) + "," + std::to_string(row.inconclusive) +
               "," + format_double(row.irregular_capacity) + "\n";
        json r;
        r["h"] = row.h;
        r["tested"] = row.tested.size();
        r["irregular"] = row.irregular.size();
        r["inconclusive"] = row.inconclusive;
        r["irregular_capacity"] = row.irregular_capacity;
        rows.push_back(std::move(r));
    }
    atomic_write(fs::path(cfg.out_dir) / "kellogg.csv", csv);
    json j;
    j["rows"] = std::move(rows);
    atomic_write(fs::path(cfg.out_dir) / "kellogg.json", j.dump(2) + "\n");
}

}  // namespace

void execute(const ExperimentConfig& cfg) {
    if (cfg.task == "solve")
        run_solve(cfg, false);
    else if (cfg.task == "obstacle")
        run_solve(cfg, true);
    else if (cfg.task == "capacity")
        run_capacity(cfg);
    else if (cfg.task == "wiener")
        run_wiener(cfg);
    else if (cfg.task == "classify")
        run_classify(cfg);
    else if (cfg.task == "perron")
        run_perron(cfg);
    else if (cfg.task == "perturbation")
        run_perturbation(cfg);
    else if (cfg.task == "kellogg")
        run_kellogg(cfg);
    else
        throw ConfigError("config key \"task\": missing or unknown");
}

int run(const std::string& config_path, const RunOverrides* overrides) {
    try {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (overrides) {
            if (!overrides->out_dir.empty()) cfg.out_dir = overrides->out_dir;
            if (!overrides->task.empty()) cfg.task = overrides->task;
            if (overrides->jobs > 0) cfg.jobs = overrides->jobs;
            cfg.dump_weights = cfg.dump_weights || overrides->dump_weights;
            cfg.dump_residual = cfg.dump_residual || overrides->dump_residual;
        }
        execute(cfg);
        return kExitOk;
    } catch (const SolverError& e) {
        json err;
        err["error"] = e.what();
        err["code"] = kExitNoConvergence;
        std::cerr << err.dump() << "\n";
        return kExitNoConvergence;
    } catch (const ResolutionError& e) {
        json err;
        err["error"] = e.what();
        err["code"] = kExitResolution;
        std::cerr << err.dump() << "\n";
        return kExitResolution;
    } catch (const Error& e) {
        json err;
        err["error"] = e.what();
        err["code"] = kExitConfig;
        std::cerr << err.dump() << "\n";
        return kExitConfig;
    }
}

}  // namespace fracperron
