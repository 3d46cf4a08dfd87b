#include "perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracperron {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<int>> overlapping_blocks(const Grid& grid, const NodeSet& omega) {
    std::vector<std::vector<int>> blocks;
    const int nx = grid.count(0);
    const int ny = grid.dim() == 2 ? grid.count(1) : 1;
    auto node = [nx](int ix, int iy) { return iy * nx + ix; };
    const int bx = std::max(1, nx - 1);
    const int by = grid.dim() == 2 ? std::max(1, ny - 1) : 1;
    for (int iy = 0; iy < by; ++iy)
        for (int ix = 0; ix < bx; ++ix) {
            std::vector<int> block;
            for (int dy = 0; dy < (grid.dim() == 2 ? 2 : 1); ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const int jx = std::min(ix + dx, nx - 1);
                    const int jy = std::min(iy + dy, ny - 1);
                    const int i = node(jx, jy);
                    if (omega.contains(i) &&
                        std::find(block.begin(), block.end(), i) == block.end())
                        block.push_back(i);
                }
            if (!block.empty()) blocks.push_back(std::move(block));
        }
    return blocks;
}

// Decreasing Perron iteration from the constant upper bound.
struct EnvelopeResult {
    Field u;
    long passes = 0;
    bool converged = false;
};

EnvelopeResult upper_envelope(const Field& g, const NodeSet& omega, const WeightMatrix& w,
                              const SolveOpts& opts) {
    const double p = w.params().p;
    const double tol = opts.resolved_tol(p);
    const long max_passes = opts.resolved_max_sweeps(omega.count());

    EnvelopeResult out;
    out.u = g;
    double sup = g.far_value;
    for (int i = 0; i < g.size(); ++i)
        if (!omega.contains(i)) sup = std::max(sup, g.values[i]);
    for (int i : omega.indices()) out.u.values[i] = sup;

    const auto blocks = overlapping_blocks(*w.grid(), omega);
    std::vector<double>& u = out.u.values;
    while (out.passes < max_passes) {
        ++out.passes;
        double delta = 0.0;
        for (const auto& block : blocks) {
            // Poisson modification on the block: a small Dirichlet solve with
            // the current field as data.
            for (int inner = 0; inner < 64; ++inner) {
                double inner_delta = 0.0;
                for (int i : block) {
                    const double t =
                        nodal_minimize(w, u, out.u.far_value, i, 0.0, -kInf, kInf,
                                       opts.bisect_tol);
                    inner_delta = std::max(inner_delta, std::abs(t - u[i]));
                    delta = std::max(delta, std::abs(t - u[i]));
                    u[i] = t;
                }
                if (inner_delta <= tol / 100.0) break;
            }
        }
        if (delta <= tol) {
            double residual = 0.0;
            for (int i : omega.indices())
                residual = std::max(residual, std::abs(nodal_residual(out.u, w, i)));
            if (residual <= tol) {
                out.converged = true;
                break;
            }
        }
    }
    return out;
}

}  // namespace

bool is_supersolution(const Field& u, const NodeSet& omega, const WeightMatrix& w, double tol) {
    u.check_finite();
    for (int i : omega.indices())
        if (nodal_residual(u, w, i) < -tol) return false;
    return true;
}

Field poisson_modify(const Field& u, const NodeSet& g_set, const NodeSet& omega,
                     const WeightMatrix& w, const SolveOpts& opts) {
    require_same_grid(u.grid, w.grid());
    if (!g_set.subset_of(omega)) throw ConfigError("poisson_modify: G must lie inside omega");
    const double tol = opts.resolved_tol(w.params().p);
    if (!is_supersolution(u, omega, w, tol))
        throw ConfigError("poisson_modify: input is not a supersolution at the given tolerance");
    if (g_set.empty()) return u;
    return solve_dirichlet(u, g_set, w, opts).u;
}

PerronReport upper_perron(const Field& g, const NodeSet& omega, const WeightMatrix& w,
                          const SolveOpts& opts) {
    g.check_finite();
    require_same_grid(g.grid, w.grid());
    if (omega.empty()) throw ConfigError("upper_perron: omega is empty");

    PerronReport report;
    auto up = upper_envelope(g, omega, w, opts);
    report.upper = std::move(up.u);
    report.passes = up.passes;
    report.converged = up.converged;

    Field neg = g;
    for (auto& v : neg.values) v = -v;
    neg.far_value = -neg.far_value;
    auto low = upper_envelope(neg, omega, w, opts);
    report.converged = report.converged && low.converged;
    report.lower = std::move(low.u);
    for (auto& v : report.lower.values) v = -v;
    report.lower.far_value = -report.lower.far_value;

    report.hg = solve_dirichlet(g, omega, w, opts).u;
    for (int i : omega.indices()) {
        report.gap_sup = std::max(report.gap_sup,
                                  report.upper.values[i] - report.lower.values[i]);
        report.dev_sup =
            std::max(report.dev_sup, std::abs(report.upper.values[i] - report.hg.values[i]));
    }
    return report;
}

PerturbationRow perturbation_row(const PerturbationCase& pc, const FracParams& params,
                                 const SolveOpts& opts) {
    PerturbationRow row;
    row.h = pc.grid->h();
    for (int i : pc.perturbed_set.indices())
        if (pc.omega.contains(i))
            throw ConfigError("perturbation: E_k must lie in omega's complement");
    row.capacity = sobolev_capacity(pc.perturbed_set, params, *pc.weights, opts).value;

    const auto base = solve_dirichlet(pc.g, pc.omega, *pc.weights, opts);
    Field perturbed = pc.g;
    for (int i : pc.perturbed_set.indices()) perturbed.values[i] += pc.pert_height;
    const auto shifted = solve_dirichlet(perturbed, pc.omega, *pc.weights, opts);

    const auto& grid = *pc.grid;
    auto dist_to_complement = [&](int i) {
        const Point a = grid.coord(i);
        double d = std::min(a[0] - grid.lo(0), grid.hi(0) - a[0]);
        if (grid.dim() == 2)
            d = std::min({d, a[1] - grid.lo(1), grid.hi(1) - a[1]});
        for (int j = 0; j < grid.size(); ++j) {
            if (pc.omega.contains(j)) continue;
            const Point b = grid.coord(j);
            d = std::min(d, std::hypot(a[0] - b[0], a[1] - b[1]));
        }
        return d;
    };
    for (int i : pc.omega.indices()) {
        if (pc.observe_margin > 0.0 && dist_to_complement(i) < pc.observe_margin) continue;
        row.deviation = std::max(row.deviation,
                                 std::abs(shifted.u.values[i] - base.u.values[i]));
    }
    return row;
}

KelloggRow kellogg_row(const Shape& omega_shape, const std::vector<Point>& sample_points,
                       GridPtr grid, const FracParams& params, const RegOpts& opts) {
    KelloggRow row;
    row.h = grid->h();
    row.tested = sample_points;
    auto weights = assemble_weights(grid, params);
    for (const Point& x0 : sample_points) {
        const auto verdict = classify(x0, omega_shape, grid, *weights, params, opts);
        row.verdicts.push_back(verdict.verdict);
        if (verdict.verdict == Verdict::Irregular) row.irregular.push_back(x0);
        if (verdict.verdict == Verdict::Inconclusive) ++row.inconclusive;
    }
    // one-cell neighbourhood mask around each irregular point
    NodeSet mask(grid, SetRole::Exceptional);
    const double reach = grid->h() * 0.5 * (1.0 + 1e-9);
    for (const Point& x0 : row.irregular)
        for (int i = 0; i < grid->size(); ++i) {
            const Point c = grid->coord(i);
            const double dx = std::abs(c[0] - x0[0]);
            const double dy = grid->dim() == 2 ? std::abs(c[1] - x0[1]) : 0.0;
            if (std::max(dx, dy) <= reach) mask.add(i);
        }
    row.irregular_capacity =
        mask.empty() ? 0.0 : sobolev_capacity(mask, params, *weights, opts.solver).value;
    return row;
}

namespace {

std::vector<double> midranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ConfigError("spearman: need matched samples");
    const auto ra = midranks(a);
    const auto rb = midranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace fracperron
