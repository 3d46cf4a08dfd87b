#pragma once

#include <string>

#include "capacity.hpp"
#include "shape.hpp"

namespace fracperron {

// Dyadic discretization of the Wiener integral at x0: radii rho_j = r0 2^-j,
// terms (cap(B(x0,rho_j)-closure \ omega, B(x0,2 rho_j)) / rho_j^(n-sp))^(1/(p-1)),
// partial sums accumulate term_j * ln 2.
struct WienerProfile {
    Point x0{};
    std::vector<double> radii;
    std::vector<double> caps;
    std::vector<double> terms;
    std::vector<double> partial_sums;
    bool resolution_flag = false;  // truncated below the requested depth

    int levels() const { return static_cast<int>(terms.size()); }
};

enum class Verdict { Regular, Irregular, Inconclusive };

struct RegularityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    int wiener_vote = 0;     // +1 regular-leaning, -1 irregular-leaning, 0 no signal
    int barrier_vote = 0;
    int potential_vote = 0;
    double wiener_first_term = 0.0;
    double wiener_last_term = 0.0;
    double wiener_median_term = 0.0;
    double barrier_max_near = 0.0;   // max Hd_{x0} over interior nodes within 2h of x0
    double barrier_rescale = 1.0;
    double potential_min_near = 0.0; // min potential over interior nodes within 2h of x0
    bool resolution_flag = false;
    std::string notes;               // records the heuristic thresholds used
};

struct RegOpts {
    double r0 = 0.0;        // 0 picks half the distance from x0 to the box boundary
    int levels = 4;         // J; profile has levels+1 entries when nothing truncates
    double barrier_tol = 0.35;
    double pot_tol = 0.35;
    double potential_radius_cells = 4.0;  // rho = 4h for the potential test
    SolveOpts solver;
    std::int64_t max_subgrid_nodes = 1 << 16;

    bool operator==(const RegOpts&) const = default;
};

struct BarrierResult {
    Field field;
    double rescale = 1.0;  // lengths were multiplied by this before solving
};

// Condenser capacities on per-level local subgrids, 8 cells across each rho_j
// and x0 at a cell corner. Truncates with a resolution flag when a level can
// no longer be resolved.
WienerProfile wiener_profile(const Point& x0, const Shape& omega, int dim,
                             const FracParams& params, double r0, int levels,
                             const RegOpts& opts = {});

// H_omega d_{x0} with d_{x0}(x) = min(1, |x-x0|) sampled at cell centers and
// far value 1. Rescales lengths when the box cannot saturate d_{x0}.
BarrierResult barrier_solution(const Point& x0, const NodeSet& omega, const WeightMatrix& w,
                               const SolveOpts& opts = {});

// L-potential of closure(B(x0, rho)) \ omega inside B(x0, 2 rho) on the model
// grid; data 1 on the compact set, 0 outside the larger ball.
Field potential_field(const Point& x0, double rho, const NodeSet& omega, const WeightMatrix& w,
                      const SolveOpts& opts = {});

// Three tests (Wiener trend, barrier smallness, potential near 1) combined by
// majority; irregular only when no test leans regular.
RegularityVerdict classify(const Point& x0, const Shape& omega_shape, const GridPtr& grid,
                           const WeightMatrix& w, const FracParams& params,
                           const RegOpts& opts = {});

}  // namespace fracperron
