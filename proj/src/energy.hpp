#pragma once

#include <cmath>

#include "model.hpp"

namespace fracperron {

// Phi(t) = |t|^(p-2) t, the odd monotone nonlinearity of the operator.
inline double phi(double t, double p) {
    if (t == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

// Nodal operator values r_i = 2 sum_j Phi(u_i-u_j) W_ij + 2 Phi(u_i-far) c_far_i
// over the interior nodes of omega.
struct Residual {
    std::vector<double> r;       // indexed by node; zero outside omega
    double sup_norm = 0.0;       // max |r_i| over omega
};

enum class NodeClass { SupersolutionLike, SubsolutionLike, HarmonicLike, Neither };

// E(u,v): pairs with at least one endpoint in omega, plus far-field terms for
// omega nodes. Linear in v, equals the minimization energy at v = u.
double energy_form(const Field& u, const Field& v, const WeightMatrix& w, const NodeSet& omega);

double energy(const Field& u, const WeightMatrix& w, const NodeSet& omega);

// Full Gagliardo-type seminorm to the p-th power: every ordered node pair plus
// far-field terms for every node. Used by the capacity module.
double seminorm_p(const Field& u, const WeightMatrix& w);

// Single nodal residual; i need not lie in omega.
double nodal_residual(const Field& u, const WeightMatrix& w, int i);

Residual apply_operator(const Field& u, const WeightMatrix& w, const NodeSet& omega);

// |r_i| <= tol is harmonic-like; the sign decides otherwise. NaN gives Neither.
NodeClass classify_node(const Field& u, int i, const WeightMatrix& w, const NodeSet& omega,
                        double tol);

}  // namespace fracperron
