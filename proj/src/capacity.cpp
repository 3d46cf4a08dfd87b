#include "capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracperron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lp_mass(const Field& u, const WeightMatrix& w) {
    const double p = w.params().p;
    const double measure = w.grid()->cell_measure();
    double acc = 0.0;
    for (double v : u.values) acc += std::pow(std::abs(v), p) * measure;
    return acc;
}

SolveOpts capacity_opts(const SolveOpts& opts) {
    SolveOpts out = opts;
    out.init = SolveOpts::Init::Constant;
    out.init_value = 0.0;
    return out;
}

}  // namespace

WeightsPtr standard_weights(const FracParams& params, const WeightMatrix& w) {
    if (w.standard_kernel() && w.params().s == params.s && w.params().p == params.p)
        return std::make_shared<const WeightMatrix>(w);
    FracParams pinned;
    pinned.s = params.s;
    pinned.p = params.p;
    pinned.lambda = 1.0;
    return assemble_weights(w.grid(), pinned);
}

CapacityResult condenser_capacity(const NodeSet& K, const NodeSet& omega, const FracParams& params,
                                  const WeightMatrix& w, const SolveOpts& opts) {
    require_same_grid(K.grid, w.grid());
    require_same_grid(omega.grid, w.grid());
    if (!K.subset_of(omega)) throw ConfigError("condenser capacity: K must lie inside omega");
    const auto std_w = standard_weights(params, w);

    CapacityResult out;
    out.kind = CapacityResult::Kind::Condenser;
    out.minimizer = Field(w.grid(), 0.0, 0.0);
    if (K.empty()) return out;

    // Obstacle chi_K, zero exterior data, clamped to the unit box.
    std::vector<double> lb(w.size(), -kInf);
    std::vector<double> ub(w.size(), kInf);
    for (int i : omega.indices()) {
        lb[i] = K.contains(i) ? 1.0 : 0.0;
        ub[i] = 1.0;
    }
    Field start(w.grid(), 0.0, 0.0);
    for (int i : K.indices()) start.values[i] = 1.0;
    auto report = sweep_solve(*std_w, omega, std::move(start), lb, ub, 0.0, capacity_opts(opts));
    out.minimizer = std::move(report.u);
    out.converged = report.converged;
    out.value = seminorm_p(out.minimizer, *std_w);
    return out;
}

CapacityResult condenser_capacity_direct(const NodeSet& K, const NodeSet& omega,
                                         const FracParams& params, const WeightMatrix& w,
                                         const SolveOpts& opts) {
    require_same_grid(K.grid, w.grid());
    require_same_grid(omega.grid, w.grid());
    if (!K.subset_of(omega)) throw ConfigError("condenser capacity: K must lie inside omega");
    const auto std_w = standard_weights(params, w);

    CapacityResult out;
    out.kind = CapacityResult::Kind::Condenser;
    out.minimizer = Field(w.grid(), 0.0, 0.0);
    if (K.empty()) return out;

    NodeSet free(w.grid(), SetRole::Domain);
    for (int i : omega.indices())
        if (!K.contains(i)) free.add(i);
    Field start(w.grid(), 0.0, 0.0);
    for (int i : K.indices()) start.values[i] = 1.0;
    if (!free.empty()) {
        const std::vector<double> lb(w.size(), -kInf);
        const std::vector<double> ub(w.size(), kInf);
        auto report = sweep_solve(*std_w, free, std::move(start), lb, ub, 0.0,
                                  capacity_opts(opts));
        out.converged = report.converged;
        start = std::move(report.u);
    }
    out.minimizer = std::move(start);
    out.value = seminorm_p(out.minimizer, *std_w);
    return out;
}

CapacityResult sobolev_capacity(const NodeSet& E, const FracParams& params, const WeightMatrix& w,
                                const SolveOpts& opts) {
    require_same_grid(E.grid, w.grid());
    const auto std_w = standard_weights(params, w);

    CapacityResult out;
    out.kind = CapacityResult::Kind::Sobolev;
    out.minimizer = Field(w.grid(), 0.0, 0.0);
    if (E.empty()) return out;

    NodeSet free(w.grid(), SetRole::Domain);
    std::vector<double> lb(w.size(), 0.0);
    std::vector<double> ub(w.size(), 1.0);
    for (int i = 0; i < w.size(); ++i) {
        free.add(i);
        if (E.contains(i)) lb[i] = 1.0;
    }
    Field start(w.grid(), 0.0, 0.0);
    for (int i : E.indices()) start.values[i] = 1.0;
    const double mass = w.grid()->cell_measure() / 2.0;
    auto report = sweep_solve(*std_w, free, std::move(start), lb, ub, mass, capacity_opts(opts));
    out.minimizer = std::move(report.u);
    out.converged = report.converged;
    out.value = seminorm_p(out.minimizer, *std_w) + lp_mass(out.minimizer, *std_w);
    return out;
}

ComparabilityReport comparability_check(const NodeSet& E, const NodeSet& omega,
                                        const FracParams& params, const WeightMatrix& w,
                                        double budget, const SolveOpts& opts) {
    require_same_grid(E.grid, w.grid());
    require_same_grid(omega.grid, w.grid());
    const auto& grid = *w.grid();
    const double h = grid.h();

    ComparabilityReport rep;
    rep.budget = budget;

    // distance from E to omega's complement, box exterior included
    double dist = kInf;
    for (int i : E.indices()) {
        const Point a = grid.coord(i);
        dist = std::min(dist, a[0] - grid.lo(0));
        dist = std::min(dist, grid.hi(0) - a[0]);
        if (grid.dim() == 2) {
            dist = std::min(dist, a[1] - grid.lo(1));
            dist = std::min(dist, grid.hi(1) - a[1]);
        }
        for (int j = 0; j < grid.size(); ++j) {
            if (omega.contains(j)) continue;
            const Point b = grid.coord(j);
            dist = std::min(dist, std::hypot(a[0] - b[0], a[1] - b[1]));
        }
    }
    if (!E.empty() && dist < h) throw ConfigError("comparability: E touches omega's complement");
    rep.dist_to_complement = E.empty() ? 0.0 : dist;

    double diam = 0.0;
    const auto om = omega.indices();
    for (std::size_t a = 0; a < om.size(); ++a)
        for (std::size_t b = a + 1; b < om.size(); ++b) {
            const Point pa = grid.coord(om[a]);
            const Point pb = grid.coord(om[b]);
            diam = std::max(diam, std::hypot(pa[0] - pb[0], pa[1] - pb[1]));
        }
    rep.diam_omega = diam + h;  // cells extend half a spacing beyond their centers

    rep.condenser = condenser_capacity(E, omega, params, w, opts).value;
    rep.sobolev = sobolev_capacity(E, params, w, opts).value;

    const double sp = params.s * params.p;
    if (rep.condenser > 0.0)
        rep.ratio_lower = rep.sobolev / (rep.condenser * (1.0 + std::pow(rep.diam_omega, sp)));
    if (rep.sobolev > 0.0)
        rep.ratio_upper =
            rep.condenser / (rep.sobolev * (1.0 + std::pow(rep.dist_to_complement, -params.p)));
    rep.ok = rep.ratio_lower <= budget && rep.ratio_upper <= budget;
    return rep;
}

}  // namespace fracperron
