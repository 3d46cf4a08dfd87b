#include "fracperron.h"

#include <cstring>
#include <string>

#include "capacity.hpp"
#include "expr.hpp"
#include "perron.hpp"
#include "runner.hpp"
#include "shape.hpp"

using namespace fracperron;

namespace {

thread_local std::string g_error;
thread_local fp_status g_status = FP_OK;

void set_error(fp_status status, const char* what) {
    g_status = status;
    g_error = what ? what : "";
}

void clear_error() {
    g_status = FP_OK;
    g_error.clear();
}

fp_status status_of(const Error& e) {
    if (dynamic_cast<const SolverError*>(&e)) return FP_ERR_NO_CONVERGENCE;
    if (dynamic_cast<const ResolutionError*>(&e)) return FP_ERR_RESOLUTION;
    if (dynamic_cast<const SizeError*>(&e)) return FP_ERR_SIZE;
    if (dynamic_cast<const EllipticityError*>(&e)) return FP_ERR_ELLIPTICITY;
    if (dynamic_cast<const ConfigError*>(&e)) return FP_ERR_CONFIG;
    return FP_ERR_INVALID;
}

// Runs the body, translating exceptions into the thread-local error state.
template <typename F>
fp_status guarded(F&& body) {
    clear_error();
    try {
        body();
        return FP_OK;
    } catch (const Error& e) {
        set_error(status_of(e), e.what());
    } catch (const std::exception& e) {
        set_error(FP_ERR_INVALID, e.what());
    }
    return g_status;
}

SolveOpts to_opts(const fp_solve_opts* opts) {
    SolveOpts out;
    if (opts) {
        out.tol = opts->tol;
        out.max_sweeps = opts->max_sweeps;
        if (opts->act_tol > 0.0) out.act_tol = opts->act_tol;
        out.red_black = opts->red_black != 0;
    }
    return out;
}

}  // namespace

struct fp_model {
    GridPtr grid;
    WeightsPtr weights;
    FracParams params;
};

struct fp_set {
    NodeSet set;
};

struct fp_field {
    Field field;
};

struct fp_solution {
    SolveReport report;
    fp_field view;  // borrowed by fp_solution_field
};

extern "C" {

const char* fp_last_error(void) { return g_error.c_str(); }

fp_status fp_last_status(void) { return g_status; }

fp_model* fp_model_create(int dim, const double* box_lo, const double* box_hi, double h,
                          double s, double p, double lambda, const char* kernel_expr) {
    fp_model* out = nullptr;
    guarded([&] {
        if (!box_lo || !box_hi) throw ConfigError("model: box pointers are null");
        FracParams params;
        params.s = s;
        params.p = p;
        params.lambda = lambda;
        if (kernel_expr && *kernel_expr) {
            auto e = parse_expr(kernel_expr);
            params.kernel = [e](double r) { return e->eval({r, 0.0}, 1); };
        }
        params.validate();
        const std::array<double, 2> xr{box_lo[0], box_hi[0]};
        const std::array<double, 2> yr{dim == 2 ? box_lo[1] : 0.0, dim == 2 ? box_hi[1] : 0.0};
        auto grid = build_grid(dim, xr, yr, h);
        auto weights = assemble_weights(grid, params);
        out = new fp_model{std::move(grid), std::move(weights), std::move(params)};
    });
    return out;
}

void fp_model_free(fp_model* m) { delete m; }

int fp_model_node_count(const fp_model* m) { return m ? m->grid->size() : 0; }

int fp_model_dim(const fp_model* m) { return m ? m->grid->dim() : 0; }

fp_status fp_model_node_coords(const fp_model* m, double* out) {
    return guarded([&] {
        if (!m || !out) throw ConfigError("node_coords: null argument");
        for (int i = 0; i < m->grid->size(); ++i) {
            const Point c = m->grid->coord(i);
            for (int a = 0; a < m->grid->dim(); ++a) out[i * m->grid->dim() + a] = c[a];
        }
    });
}

double fp_model_weight(const fp_model* m, int i, int j) {
    if (!m || i < 0 || j < 0 || i >= m->weights->size() || j >= m->weights->size()) return -1.0;
    return i == j ? 0.0 : m->weights->w(i, j);
}

double fp_model_far_coefficient(const fp_model* m, int i) {
    if (!m || i < 0 || i >= m->weights->size()) return -1.0;
    return m->weights->c_far(i);
}

fp_set* fp_set_from_shape(const fp_model* m, const char* shape_spec) {
    fp_set* out = nullptr;
    guarded([&] {
        if (!m || !shape_spec) throw ConfigError("set_from_shape: null argument");
        out = new fp_set{rasterize(shape_spec, m->grid)};
    });
    return out;
}

void fp_set_free(fp_set* s) { delete s; }

int fp_set_count(const fp_set* s) { return s ? s->set.count() : 0; }

fp_status fp_set_mask(const fp_set* s, uint8_t* out) {
    return guarded([&] {
        if (!s || !out) throw ConfigError("set_mask: null argument");
        std::memcpy(out, s->set.mask.data(), s->set.mask.size());
    });
}

fp_field* fp_field_from_expr(const fp_model* m, const char* expr, double far_value) {
    fp_field* out = nullptr;
    guarded([&] {
        if (!m || !expr) throw ConfigError("field_from_expr: null argument");
        out = new fp_field{eval_field(*parse_expr(expr), m->grid, far_value)};
    });
    return out;
}

fp_field* fp_field_from_values(const fp_model* m, const double* values, double far_value) {
    fp_field* out = nullptr;
    guarded([&] {
        if (!m || !values) throw ConfigError("field_from_values: null argument");
        Field f(m->grid, 0.0, far_value);
        std::memcpy(f.values.data(), values, sizeof(double) * f.values.size());
        f.check_finite();
        out = new fp_field{std::move(f)};
    });
    return out;
}

void fp_field_free(fp_field* f) { delete f; }

fp_status fp_field_values(const fp_field* f, double* out) {
    return guarded([&] {
        if (!f || !out) throw ConfigError("field_values: null argument");
        std::memcpy(out, f->field.values.data(), sizeof(double) * f->field.values.size());
    });
}

double fp_field_far(const fp_field* f) { return f ? f->field.far_value : 0.0; }

void fp_solve_opts_default(fp_solve_opts* opts) {
    if (!opts) return;
    opts->tol = 0.0;
    opts->max_sweeps = 0;
    opts->act_tol = 1e-10;
    opts->red_black = 0;
}

fp_solution* fp_solve_dirichlet(const fp_model* m, const fp_field* g, const fp_set* omega,
                                const fp_solve_opts* opts) {
    fp_solution* out = nullptr;
    guarded([&] {
        if (!m || !g || !omega) throw ConfigError("solve_dirichlet: null argument");
        auto report = solve_dirichlet(g->field, omega->set, *m->weights, to_opts(opts));
        out = new fp_solution{std::move(report), {}};
        out->view.field = out->report.u;
    });
    return out;
}

fp_solution* fp_solve_obstacle(const fp_model* m, const fp_field* g, const fp_field* psi,
                               const fp_set* omega, const fp_solve_opts* opts) {
    fp_solution* out = nullptr;
    guarded([&] {
        if (!m || !g || !omega) throw ConfigError("solve_obstacle: null argument");
        ObstacleSpec spec;
        spec.g = g->field;
        if (psi) spec.psi = psi->field;
        auto report = solve_obstacle(spec, omega->set, *m->weights, to_opts(opts));
        out = new fp_solution{std::move(report), {}};
        out->view.field = out->report.u;
    });
    return out;
}

void fp_solution_free(fp_solution* s) { delete s; }

const fp_field* fp_solution_field(const fp_solution* s) { return s ? &s->view : nullptr; }

double fp_solution_energy(const fp_solution* s) { return s ? s->report.energy : 0.0; }

double fp_solution_residual_sup(const fp_solution* s) { return s ? s->report.residual_sup : 0.0; }

long fp_solution_iterations(const fp_solution* s) { return s ? s->report.iterations : 0; }

int fp_solution_converged(const fp_solution* s) { return s && s->report.converged ? 1 : 0; }

fp_status fp_energy_form(const fp_model* m, const fp_field* u, const fp_field* v,
                         const fp_set* omega, double* out) {
    return guarded([&] {
        if (!m || !u || !v || !omega || !out) throw ConfigError("energy_form: null argument");
        *out = energy_form(u->field, v->field, *m->weights, omega->set);
    });
}

fp_status fp_apply_operator(const fp_model* m, const fp_field* u, const fp_set* omega,
                            double* out_residuals, double* out_sup) {
    return guarded([&] {
        if (!m || !u || !omega || !out_residuals) throw ConfigError("apply_operator: null argument");
        const auto res = apply_operator(u->field, *m->weights, omega->set);
        std::memcpy(out_residuals, res.r.data(), sizeof(double) * res.r.size());
        if (out_sup) *out_sup = res.sup_norm;
    });
}

fp_status fp_condenser_capacity(const fp_model* m, const fp_set* compact, const fp_set* omega,
                                const fp_solve_opts* opts, double* out_value) {
    return guarded([&] {
        if (!m || !compact || !omega || !out_value)
            throw ConfigError("condenser_capacity: null argument");
        *out_value =
            condenser_capacity(compact->set, omega->set, m->params, *m->weights, to_opts(opts))
                .value;
    });
}

fp_status fp_sobolev_capacity(const fp_model* m, const fp_set* exceptional,
                              const fp_solve_opts* opts, double* out_value) {
    return guarded([&] {
        if (!m || !exceptional || !out_value) throw ConfigError("sobolev_capacity: null argument");
        *out_value = sobolev_capacity(exceptional->set, m->params, *m->weights, to_opts(opts))
                         .value;
    });
}

fp_status fp_expr_eval(const char* expr, const double* coords, int dim, double* out) {
    return guarded([&] {
        if (!expr || !coords || !out) throw ConfigError("expr_eval: null argument");
        if (dim != 1 && dim != 2) throw ConfigError("expr_eval: dim must be 1 or 2");
        const Point at{coords[0], dim == 2 ? coords[1] : 0.0};
        *out = expr_eval(expr, at, dim);
    });
}

int fp_run(const char* config_path, const fp_run_overrides* overrides) {
    if (!config_path) {
        set_error(FP_ERR_CONFIG, "run: config path is null");
        return kExitConfig;
    }
    clear_error();
    RunOverrides o;
    if (overrides) {
        if (overrides->out_dir) o.out_dir = overrides->out_dir;
        if (overrides->task) o.task = overrides->task;
        o.jobs = overrides->jobs;
        o.dump_weights = overrides->dump_weights != 0;
        o.dump_residual = overrides->dump_residual != 0;
    }
    return run(config_path, &o);
}

char* fp_print_config(const char* config_path) {
    char* out = nullptr;
    guarded([&] {
        if (!config_path) throw ConfigError("print_config: config path is null");
        const std::string text = print_config(parse_config_file(config_path));
        out = new char[text.size() + 1];
        std::memcpy(out, text.c_str(), text.size() + 1);
    });
    return out;
}

void fp_string_free(char* s) { delete[] s; }

}  // extern "C"
