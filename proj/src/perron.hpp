#pragma once

#include "regularity.hpp"

namespace fracperron {

struct PerronReport {
    Field upper;
    Field lower;
    Field hg;
    double gap_sup = 0.0;  // max over interior of upper - lower
    double dev_sup = 0.0;  // max over interior of |upper - hg|
    long passes = 0;
    bool converged = false;
};

bool is_supersolution(const Field& u, const NodeSet& omega, const WeightMatrix& w, double tol);

// Poisson modification: replace u inside G by the Dirichlet solution with u's
// own exterior data. Decreases u in G and preserves the supersolution
// property (up to solver tolerance).
Field poisson_modify(const Field& u, const NodeSet& g_set, const NodeSet& omega,
                     const WeightMatrix& w, const SolveOpts& opts = {});

// Decreasing envelope from u = sup g via cyclic overlapping 2(x2) node blocks;
// the lower envelope runs the same procedure on -g.
PerronReport upper_perron(const Field& g, const NodeSet& omega, const WeightMatrix& w,
                          const SolveOpts& opts = {});

struct PerturbationCase {
    GridPtr grid;
    WeightsPtr weights;
    NodeSet omega;
    NodeSet perturbed_set;  // E_k inside omega^c
    Field g;
    double pert_height = 1.0;
    // The invariance theorem is locally uniform in omega, not uniform up to
    // the boundary; deviations are read off nodes at least this far from
    // omega's complement. Keep it fixed across a refinement family.
    double observe_margin = 0.0;
};

struct PerturbationRow {
    double h = 0.0;
    double capacity = 0.0;   // C_{s,p}(E_k)
    double deviation = 0.0;  // sup of |H(g + height chi_E) - Hg| over observed nodes
};

PerturbationRow perturbation_row(const PerturbationCase& pc, const FracParams& params,
                                 const SolveOpts& opts = {});

struct KelloggRow {
    double h = 0.0;
    std::vector<Point> tested;
    std::vector<Verdict> verdicts;
    std::vector<Point> irregular;
    int inconclusive = 0;
    double irregular_capacity = 0.0;  // C_{s,p} of the one-cell-per-point mask
};

KelloggRow kellogg_row(const Shape& omega_shape, const std::vector<Point>& sample_points,
                       GridPtr grid, const FracParams& params, const RegOpts& opts = {});

// Spearman rank correlation; ties get midranks.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace fracperron
