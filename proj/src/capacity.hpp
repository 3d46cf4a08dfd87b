#pragma once

#include "solver.hpp"

namespace fracperron {

// Both capacities pin the standard kernel with lambda = 1 no matter what the
// model weights were assembled with; regularity is kernel-independent.
struct CapacityResult {
    enum class Kind { Condenser, Sobolev };
    double value = 0.0;
    Field minimizer;
    Kind kind = Kind::Condenser;
    bool converged = true;
};

// cap_{s,p}(K, omega): obstacle route. The solution of the obstacle problem
// with obstacle chi_K and zero exterior data attains the infimum; the value is
// the full seminorm of the minimizer to the p-th power.
CapacityResult condenser_capacity(const NodeSet& K, const NodeSet& omega, const FracParams& params,
                                  const WeightMatrix& w, const SolveOpts& opts = {});

// Same value through the other route: u pinned to 1 on K, 0 outside omega,
// unconstrained in between. Kept separate so the two can be cross-checked.
CapacityResult condenser_capacity_direct(const NodeSet& K, const NodeSet& omega,
                                         const FracParams& params, const WeightMatrix& w,
                                         const SolveOpts& opts = {});

// C_{s,p}(E): minimize the full norm ||u||^p = ||u||_Lp^p + [u]^p over fields
// with 0 <= u <= 1, u = 1 on E and far value 0. The L^p term is truncated to
// the bounding box with cell measure h^n.
CapacityResult sobolev_capacity(const NodeSet& E, const FracParams& params, const WeightMatrix& w,
                                const SolveOpts& opts = {});

struct ComparabilityReport {
    double condenser = 0.0;
    double sobolev = 0.0;
    double diam_omega = 0.0;
    double dist_to_complement = 0.0;
    // sobolev / (cap * (1 + diam^sp)) and cap / (sobolev * (1 + dist^-p));
    // bounded by a constant depending only on n, s, p.
    double ratio_lower = 0.0;
    double ratio_upper = 0.0;
    double budget = 0.0;
    bool ok = true;
};

ComparabilityReport comparability_check(const NodeSet& E, const NodeSet& omega,
                                        const FracParams& params, const WeightMatrix& w,
                                        double budget = 100.0, const SolveOpts& opts = {});

// Weights with the kernel pinned to standard; reuses w when already standard.
WeightsPtr standard_weights(const FracParams& params, const WeightMatrix& w);

}  // namespace fracperron
