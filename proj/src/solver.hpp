#pragma once

#include <optional>

#include "energy.hpp"
#include "model.hpp"

namespace fracperron {

struct SolveOpts {
    double tol = 0.0;          // <= 0 picks the default: 1e-8 for p == 2, 1e-6 otherwise
    long max_sweeps = 0;       // <= 0 picks 50 * node count
    double act_tol = 1e-10;    // active-set slack
    double bisect_tol = 1e-12; // nodal subproblem accuracy
    bool red_black = false;    // optional parallel-style schedule; sequential sweeps by default

    enum class Init { ExteriorMean, ExteriorSup, Constant };
    Init init = Init::ExteriorMean;
    double init_value = 0.0;   // used when init == Constant

    double resolved_tol(double p) const {
        if (tol > 0.0) return tol;
        return p == 2.0 ? 1e-8 : 1e-6;
    }
    long resolved_max_sweeps(int nodes) const {
        return max_sweeps > 0 ? max_sweeps : 50L * std::max(nodes, 1);
    }

    bool operator==(const SolveOpts&) const = default;
};

struct SolveReport {
    Field u;
    long iterations = 0;           // sweeps executed
    double final_sweep_delta = 0.0;
    double energy = 0.0;
    double residual_sup = 0.0;     // sup |r_i| over the free nodes
    NodeSet active_set;            // nodes where u hit the lower bound
    bool converged = false;
};

// Non-convergence carries the partial state for diagnosis.
struct SolverError : Error {
    SolveReport report;
    SolverError(const std::string& what, SolveReport rep)
        : Error(what), report(std::move(rep)) {}
};

struct ObstacleSpec {
    std::optional<Field> psi;  // absent encodes psi == -inf (plain Dirichlet class)
    Field g;                   // exterior data; interior entries seed nothing
};

// Box-constrained coordinatewise minimization of
//   sum_pairs |u_i-u_j|^p W_ij + 2 sum_i |u_i-far|^p c_far_i + 2 mass sum_i |u_i|^p
// over the free nodes, the rest of the field held fixed. Each nodal problem is
// strictly convex; bisection on the monotone derivative, then projection.
SolveReport sweep_solve(const WeightMatrix& w, const NodeSet& free_nodes, Field start,
                        const std::vector<double>& lower, const std::vector<double>& upper,
                        double mass, const SolveOpts& opts);

// One nodal subproblem: argmin over t in [lb, ub] of the energy restricted to
// node i, all other values fixed. Building block for block schedules.
double nodal_minimize(const WeightMatrix& w, const std::vector<double>& values, double far, int i,
                      double mass, double lb, double ub, double bisect_tol = 1e-12);

SolveReport solve_dirichlet(const Field& g, const NodeSet& omega, const WeightMatrix& w,
                            const SolveOpts& opts = {});

SolveReport solve_obstacle(const ObstacleSpec& spec, const NodeSet& omega, const WeightMatrix& w,
                           const SolveOpts& opts = {});

}  // namespace fracperron
