#include "energy.hpp"

#include <cmath>

namespace fracperron {

namespace {

// Compensated accumulator; the pair sums run over up to N^2 terms.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void check_inputs(const Field& u, const WeightMatrix& w, const NodeSet& omega) {
    require_same_grid(u.grid, w.grid());
    require_same_grid(omega.grid, w.grid());
}

}  // namespace

double energy_form(const Field& u, const Field& v, const WeightMatrix& w, const NodeSet& omega) {
    check_inputs(u, w, omega);
    require_same_grid(v.grid, w.grid());
    const double p = w.params().p;
    const int n = w.size();
    Kahan acc;
    for (int i = 0; i < n; ++i) {
        const double* wi = w.row(i);
        const bool i_in = omega.contains(i);
        for (int j = i + 1; j < n; ++j) {
            if (!i_in && !omega.contains(j)) continue;
            const double wij = wi[j];
            if (wij == 0.0) continue;
            acc.add(2.0 * phi(u.values[i] - u.values[j], p) * (v.values[i] - v.values[j]) * wij);
        }
        if (i_in)
            acc.add(2.0 * phi(u.values[i] - u.far_value, p) * (v.values[i] - v.far_value) *
                    w.c_far(i));
    }
    return acc.sum;
}

double energy(const Field& u, const WeightMatrix& w, const NodeSet& omega) {
    return energy_form(u, u, w, omega);
}

double seminorm_p(const Field& u, const WeightMatrix& w) {
    require_same_grid(u.grid, w.grid());
    const double p = w.params().p;
    const int n = w.size();
    Kahan acc;
    for (int i = 0; i < n; ++i) {
        const double* wi = w.row(i);
        for (int j = i + 1; j < n; ++j)
            acc.add(2.0 * std::pow(std::abs(u.values[i] - u.values[j]), p) * wi[j]);
        acc.add(2.0 * std::pow(std::abs(u.values[i] - u.far_value), p) * w.c_far(i));
    }
    return acc.sum;
}

double nodal_residual(const Field& u, const WeightMatrix& w, int i) {
    const double p = w.params().p;
    const int n = w.size();
    const double* wi = w.row(i);
    const double ui = u.values[i];
    Kahan acc;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        acc.add(phi(ui - u.values[j], p) * wi[j]);
    }
    acc.add(phi(ui - u.far_value, p) * w.c_far(i));
    return 2.0 * acc.sum;
}

Residual apply_operator(const Field& u, const WeightMatrix& w, const NodeSet& omega) {
    check_inputs(u, w, omega);
    Residual res;
    res.r.assign(w.size(), 0.0);
    for (int i = 0; i < w.size(); ++i) {
        if (!omega.contains(i)) continue;
        res.r[i] = nodal_residual(u, w, i);
        res.sup_norm = std::max(res.sup_norm, std::abs(res.r[i]));
    }
    return res;
}

NodeClass classify_node(const Field& u, int i, const WeightMatrix& w, const NodeSet& omega,
                        double tol) {
    check_inputs(u, w, omega);
    if (!omega.contains(i)) throw ConfigError("classify_node: node is not interior");
    const double r = nodal_residual(u, w, i);
    if (std::isnan(r)) return NodeClass::Neither;
    if (std::abs(r) <= tol) return NodeClass::HarmonicLike;
    return r > 0.0 ? NodeClass::SupersolutionLike : NodeClass::SubsolutionLike;
}

}  // namespace fracperron
