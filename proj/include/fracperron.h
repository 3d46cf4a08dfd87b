/* fracperron — nonlocal fractional p-Laplace solver library.
 *
 * C interface to the solver core: discretize the nonlocal operator on a
 * uniform grid, solve Dirichlet and obstacle problems by convex energy
 * minimization, compute fractional capacities and classify boundary points.
 *
 * All handles are opaque; every function that can fail either returns NULL
 * (constructors) or an fp_status. fp_last_error() describes the most recent
 * failure on the calling thread.
 */

#ifndef FRACPERRON_H
#define FRACPERRON_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fp_status {
    FP_OK = 0,
    FP_ERR_INVALID = 1,        /* bad arguments, grid mismatch, infeasible spec */
    FP_ERR_CONFIG = 2,         /* config/shape/expression parse or validation */
    FP_ERR_NO_CONVERGENCE = 3, /* solver exhausted its sweep budget */
    FP_ERR_RESOLUTION = 4,     /* a regularity probe could not be resolved */
    FP_ERR_SIZE = 5,           /* grid construction failed */
    FP_ERR_ELLIPTICITY = 6     /* custom kernel outside the lambda bounds */
} fp_status;

typedef struct fp_model fp_model;       /* grid + kernel params + assembled weights */
typedef struct fp_set fp_set;           /* node subset (omega, K, E, ...) */
typedef struct fp_field fp_field;       /* nodal values + far-field constant */
typedef struct fp_solution fp_solution; /* solve report */

const char* fp_last_error(void);
fp_status fp_last_status(void);

/* --- model ------------------------------------------------------------- */

/* box_lo/box_hi carry dim entries; kernel_expr NULL selects the standard
 * kernel |x-y|^-(n+sp), otherwise a radial profile expression in r. */
fp_model* fp_model_create(int dim, const double* box_lo, const double* box_hi, double h,
                          double s, double p, double lambda, const char* kernel_expr);
void fp_model_free(fp_model* m);
int fp_model_node_count(const fp_model* m);
int fp_model_dim(const fp_model* m);
/* out has node_count*dim entries, x fastest */
fp_status fp_model_node_coords(const fp_model* m, double* out);
/* quadrature weight between two nodes and the far-field coefficient */
double fp_model_weight(const fp_model* m, int i, int j);
double fp_model_far_coefficient(const fp_model* m, int i);

/* --- node sets and fields ---------------------------------------------- */

fp_set* fp_set_from_shape(const fp_model* m, const char* shape_spec);
void fp_set_free(fp_set* s);
int fp_set_count(const fp_set* s);
fp_status fp_set_mask(const fp_set* s, uint8_t* out); /* node_count entries */

fp_field* fp_field_from_expr(const fp_model* m, const char* expr, double far_value);
fp_field* fp_field_from_values(const fp_model* m, const double* values, double far_value);
void fp_field_free(fp_field* f);
fp_status fp_field_values(const fp_field* f, double* out);
double fp_field_far(const fp_field* f);

/* --- solving ------------------------------------------------------------ */

typedef struct fp_solve_opts {
    double tol;       /* <= 0 picks 1e-8 (p == 2) or 1e-6 */
    long max_sweeps;  /* <= 0 picks 50 * node count */
    double act_tol;
    int red_black;
} fp_solve_opts;

void fp_solve_opts_default(fp_solve_opts* opts);

fp_solution* fp_solve_dirichlet(const fp_model* m, const fp_field* g, const fp_set* omega,
                                const fp_solve_opts* opts);
/* psi NULL encodes the obstacle-free Dirichlet class */
fp_solution* fp_solve_obstacle(const fp_model* m, const fp_field* g, const fp_field* psi,
                               const fp_set* omega, const fp_solve_opts* opts);
void fp_solution_free(fp_solution* s);
const fp_field* fp_solution_field(const fp_solution* s); /* borrowed */
double fp_solution_energy(const fp_solution* s);
double fp_solution_residual_sup(const fp_solution* s);
long fp_solution_iterations(const fp_solution* s);
int fp_solution_converged(const fp_solution* s);

/* --- energy form --------------------------------------------------------- */

fp_status fp_energy_form(const fp_model* m, const fp_field* u, const fp_field* v,
                         const fp_set* omega, double* out);
/* out_residuals has node_count entries (zero outside omega) */
fp_status fp_apply_operator(const fp_model* m, const fp_field* u, const fp_set* omega,
                            double* out_residuals, double* out_sup);

/* --- capacities ----------------------------------------------------------- */

fp_status fp_condenser_capacity(const fp_model* m, const fp_set* compact, const fp_set* omega,
                                const fp_solve_opts* opts, double* out_value);
fp_status fp_sobolev_capacity(const fp_model* m, const fp_set* exceptional,
                              const fp_solve_opts* opts, double* out_value);

/* --- misc ----------------------------------------------------------------- */

fp_status fp_expr_eval(const char* expr, const double* coords, int dim, double* out);

/* --- experiment runner ------------------------------------------------- */

typedef struct fp_run_overrides {
    const char* out_dir; /* NULL keeps the config value */
    const char* task;
    int jobs;            /* 0 keeps the config value */
    int dump_weights;
    int dump_residual;
} fp_run_overrides;

/* Runs one experiment config; returns the process exit code (0 ok, 2 config
 * error, 3 solver non-convergence, 4 resolution failure). Error details go
 * to stderr as a single JSON line. */
int fp_run(const char* config_path, const fp_run_overrides* overrides);

/* Normalized JSON echo of a config; free with fp_string_free. */
char* fp_print_config(const char* config_path);
void fp_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FRACPERRON_H */
