#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracperron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Derivative (up to the factor 2p) of the nodal objective at node i:
//   g(t) = sum_j Phi(t-u_j) W_ij + Phi(t-far) c_far_i + mass Phi(t).
// Strictly increasing because c_far_i > 0.
double nodal_derivative(const WeightMatrix& w, const std::vector<double>& u, double far, int i,
                        double t, double p, double mass) {
    const double* wi = w.row(i);
    const int n = w.size();
    double acc = 0.0, comp = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j == i || wi[j] == 0.0) continue;
        const double term = phi(t - u[j], p) * wi[j];
        const double y = term - comp;
        const double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    acc += phi(t - far, p) * w.c_far(i);
    if (mass != 0.0) acc += mass * phi(t, p);
    return acc;
}

double solve_node(const WeightMatrix& w, const std::vector<double>& u, double far, int i, double p,
                  double mass, double lb, double ub, double bisect_tol) {
    const int n = w.size();
    const double* wi = w.row(i);
    if (p == 2.0) {
        // Linear derivative: closed-form minimizer, then projection.
        double dot = 0.0, comp = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double term = wi[j] * u[j];
            const double y = term - comp;
            const double s = dot + y;
            comp = (s - dot) - y;
            dot = s;
        }
        const double denom = w.row_sum(i) + w.c_far(i) + mass;
        const double t = (dot + w.c_far(i) * far) / denom;
        return std::clamp(t, lb, ub);
    }
    // Bracket the root of the monotone derivative by the data range.
    double lo = far, hi = far;
    for (int j = 0; j < n; ++j) {
        if (j == i || wi[j] == 0.0) continue;
        lo = std::min(lo, u[j]);
        hi = std::max(hi, u[j]);
    }
    if (mass != 0.0) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    if (lb > -kInf && lb >= hi) return lb;
    if (ub < kInf && ub <= lo) return ub;
    lo = std::max(lo, lb);
    hi = std::min(hi, ub);
    if (lo >= hi) return std::clamp(lo, lb, ub);
    if (nodal_derivative(w, u, far, i, lo, p, mass) >= 0.0) return lo;
    if (nodal_derivative(w, u, far, i, hi, p, mass) <= 0.0) return hi;
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    while (hi - lo > bisect_tol * scale) {
        const double mid = 0.5 * (lo + hi);
        if (nodal_derivative(w, u, far, i, mid, p, mass) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// KKT violation at a free node: residual sign against the active bound, plain
// |r_i| when strictly inside the box.
double kkt_violation(double r, double u, double lb, double ub, double act_tol) {
    if (lb > -kInf && u <= lb + act_tol) return std::max(0.0, -r);
    if (ub < kInf && u >= ub - act_tol) return std::max(0.0, r);
    return std::abs(r);
}

}  // namespace

double nodal_minimize(const WeightMatrix& w, const std::vector<double>& values, double far, int i,
                      double mass, double lb, double ub, double bisect_tol) {
    return solve_node(w, values, far, i, w.params().p, mass, lb, ub, bisect_tol);
}

SolveReport sweep_solve(const WeightMatrix& w, const NodeSet& free_nodes, Field start,
                        const std::vector<double>& lower, const std::vector<double>& upper,
                        double mass, const SolveOpts& opts) {
    require_same_grid(start.grid, w.grid());
    require_same_grid(free_nodes.grid, w.grid());
    const int n = w.size();
    const double p = w.params().p;
    const double tol = opts.resolved_tol(p);
    const long max_sweeps = opts.resolved_max_sweeps(free_nodes.count());
    const std::vector<int> free = free_nodes.indices();

    auto at_lb = [&](int i) { return lower[i]; };
    auto at_ub = [&](int i) { return upper[i]; };
    for (int i : free) {
        if (at_lb(i) > at_ub(i)) throw InfeasibleError("infeasible bounds at node " +
                                                       std::to_string(i));
        start.values[i] = std::clamp(start.values[i], at_lb(i), at_ub(i));
    }

    std::vector<double>& u = start.values;
    const double far = start.far_value;
    double delta = 0.0;
    long sweep = 0;
    bool converged = free.empty();
    double residual_sup = 0.0;

    std::vector<int> color;
    if (opts.red_black) {
        color.resize(free.size());
        const int nx = w.grid()->count(0);
        for (std::size_t k = 0; k < free.size(); ++k) {
            const int ix = free[k] % nx;
            const int iy = free[k] / nx;
            color[k] = (ix + iy) % 2;
        }
    }

    std::vector<double> proposed(free.size());
    while (!converged && sweep < max_sweeps) {
        ++sweep;
        delta = 0.0;
        if (!opts.red_black) {
            for (int i : free) {
                const double t =
                    solve_node(w, u, far, i, p, mass, at_lb(i), at_ub(i), opts.bisect_tol);
                delta = std::max(delta, std::abs(t - u[i]));
                u[i] = t;
            }
        } else {
            // Two half-sweeps by parity; updates within a color read the
            // snapshot, which makes the schedule order-free.
            for (int c = 0; c < 2; ++c) {
                for (std::size_t k = 0; k < free.size(); ++k)
                    if (color[k] == c)
                        proposed[k] = solve_node(w, u, far, free[k], p, mass, at_lb(free[k]),
                                                 at_ub(free[k]), opts.bisect_tol);
                for (std::size_t k = 0; k < free.size(); ++k) {
                    if (color[k] != c) continue;
                    delta = std::max(delta, std::abs(proposed[k] - u[free[k]]));
                    u[free[k]] = proposed[k];
                }
            }
        }
        if (delta <= tol / 10.0) {
            residual_sup = 0.0;
            double worst = 0.0;
            for (int i : free) {
                const double r = 2.0 * nodal_derivative(w, u, far, i, u[i], p, mass);
                residual_sup = std::max(residual_sup, std::abs(r));
                worst = std::max(worst, kkt_violation(r, u[i], at_lb(i), at_ub(i), opts.act_tol));
            }
            if (worst <= tol) converged = true;
        }
    }

    SolveReport report;
    report.iterations = sweep;
    report.final_sweep_delta = delta;
    report.converged = converged;
    report.active_set = NodeSet(w.grid(), SetRole::Domain);
    for (int i : free)
        if (at_lb(i) > -kInf && u[i] <= at_lb(i) + opts.act_tol) report.active_set.add(i);
    if (!converged) {
        residual_sup = 0.0;
        for (int i : free)
            residual_sup =
                std::max(residual_sup, std::abs(2.0 * nodal_derivative(w, u, far, i, u[i], p,
                                                                       mass)));
    }
    report.residual_sup = residual_sup;
    report.energy = energy(start, w, free_nodes);
    report.u = std::move(start);
    if (!converged)
        throw SolverError("solver did not converge within " + std::to_string(max_sweeps) +
                              " sweeps (final sweep delta " + std::to_string(delta) + ")",
                          std::move(report));
    return report;
}

namespace {

double exterior_mean(const Field& g, const NodeSet& omega) {
    double sum = g.far_value;
    long count = 1;
    for (int i = 0; i < g.size(); ++i) {
        if (omega.contains(i)) continue;
        sum += g.values[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

double exterior_sup(const Field& g, const NodeSet& omega) {
    double m = g.far_value;
    for (int i = 0; i < g.size(); ++i)
        if (!omega.contains(i)) m = std::max(m, g.values[i]);
    return m;
}

double initial_value(const Field& g, const NodeSet& omega, const SolveOpts& opts) {
    switch (opts.init) {
        case SolveOpts::Init::ExteriorSup: return exterior_sup(g, omega);
        case SolveOpts::Init::Constant: return opts.init_value;
        case SolveOpts::Init::ExteriorMean: break;
    }
    return exterior_mean(g, omega);
}

}  // namespace

SolveReport solve_dirichlet(const Field& g, const NodeSet& omega, const WeightMatrix& w,
                            const SolveOpts& opts) {
    g.check_finite();
    if (omega.empty()) throw ConfigError("solve_dirichlet: omega is empty");
    Field start = g;
    const double init = initial_value(g, omega, opts);
    for (int i : omega.indices()) start.values[i] = init;
    const std::vector<double> lb(w.size(), -kInf);
    const std::vector<double> ub(w.size(), kInf);
    return sweep_solve(w, omega, std::move(start), lb, ub, 0.0, opts);
}

SolveReport solve_obstacle(const ObstacleSpec& spec, const NodeSet& omega, const WeightMatrix& w,
                           const SolveOpts& opts) {
    spec.g.check_finite();
    if (omega.empty()) throw ConfigError("solve_obstacle: omega is empty");
    std::vector<double> lb(w.size(), -kInf);
    if (spec.psi) {
        require_same_grid(spec.psi->grid, w.grid());
        for (int i : omega.indices()) {
            const double b = spec.psi->values[i];
            if (!(b < kInf)) throw InfeasibleError("obstacle is +inf at node " + std::to_string(i));
            lb[i] = b;
        }
    }
    Field start = spec.g;
    const double init = initial_value(spec.g, omega, opts);
    for (int i : omega.indices()) start.values[i] = std::max(init, lb[i]);
    const std::vector<double> ub(w.size(), kInf);
    return sweep_solve(w, omega, std::move(start), lb, ub, 0.0, opts);
}

}  // namespace fracperron
