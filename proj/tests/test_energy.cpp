#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "energy.hpp"
#include "shape.hpp"
#include "test_helpers.hpp"

using namespace fracperron;

namespace {

FracParams params(double s, double p) {
    FracParams fp;
    fp.s = s;
    fp.p = p;
    return fp;
}

// Naive re-implementation of E(u,v): loop over every ordered node pair and
// the far region, no shortcuts. Oracle for energy_form.
double naive_energy_form(const Field& u, const Field& v, const WeightMatrix& w,
                         const NodeSet& omega) {
    const double p = w.params().p;
    double total = 0.0;
    for (int i = 0; i < w.size(); ++i)
        for (int j = 0; j < w.size(); ++j) {
            if (i == j) continue;
            if (!omega.contains(i) && !omega.contains(j)) continue;
            total += phi(u.values[i] - u.values[j], p) * (v.values[i] - v.values[j]) * w.w(i, j);
        }
    for (int i = 0; i < w.size(); ++i) {
        if (!omega.contains(i)) continue;
        total += 2.0 * phi(u.values[i] - u.far_value, p) * (v.values[i] - v.far_value) * w.c_far(i);
    }
    return total;
}

struct Setup {
    GridPtr grid;
    WeightsPtr w;
    NodeSet omega;
};

Setup make_setup(double s, double p, int cells) {
    Setup st;
    st.grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 2.0 / cells);
    st.w = assemble_weights(st.grid, params(s, p));
    st.omega = rasterize("ball(0,0.7)", st.grid);
    return st;
}

Field random_field(const GridPtr& g, std::mt19937_64& gen, double lo = -1.0, double hi = 1.0) {
    Field f(g, 0.0, testutil::uniform(gen, lo, hi));
    for (auto& v : f.values) v = testutil::uniform(gen, lo, hi);
    return f;
}

}  // namespace

TEST_CASE("constant field has zero energy against anything") {
    auto st = make_setup(0.5, 2.5, 8);
    Field u(st.grid, 3.0, 3.0);
    auto gen = testutil::rng(7);
    for (int rep = 0; rep < 3; ++rep) {
        Field v = random_field(st.grid, gen);
        CHECK(energy_form(u, v, *st.w, st.omega) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("two-node model gives 2W") {
    // two nodes, both in omega, p = 2, u = v = (1,0): two ordered pairs
    auto grid = build_grid(1, {0.0, 1.0}, {0.0, 0.0}, 0.5);
    auto w = assemble_weights(grid, params(0.5, 2.0));
    NodeSet omega(grid, SetRole::Domain);
    omega.add(0);
    omega.add(1);
    Field u(grid, 0.0, 0.0);
    u.values = {1.0, 0.0};
    const double pair = w->w(0, 1);
    const double far = 2.0 * (1.0 * w->c_far(0));  // node 0 against far_value 0
    CHECK(energy_form(u, u, *w, omega) == doctest::Approx(2.0 * pair + far).epsilon(1e-13));
}

TEST_CASE("energy_form matches the naive loop oracle") {
    auto gen = testutil::rng(11);
    for (double p : {1.5, 2.0, 3.0}) {
        auto st = make_setup(0.4, p, 6);
        for (int rep = 0; rep < 5; ++rep) {
            Field u = random_field(st.grid, gen);
            Field v = random_field(st.grid, gen);
            const double got = energy_form(u, v, *st.w, st.omega);
            const double want = naive_energy_form(u, v, *st.w, st.omega);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("apply_operator: constants are harmonic") {
    auto st = make_setup(0.5, 3.0, 8);
    Field u(st.grid, -2.0, -2.0);
    auto res = apply_operator(u, *st.w, st.omega);
    CHECK(res.sup_norm == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("apply_operator p=2 matches dense matrix oracle") {
    auto st = make_setup(0.5, 2.0, 8);
    auto gen = testutil::rng(13);
    Field u = random_field(st.grid, gen);
    auto res = apply_operator(u, *st.w, st.omega);
    for (int i : st.omega.indices()) {
        // r = 2 (D-A) u + 2 c_far (u - far)
        double want = 2.0 * st.w->row_sum(i) * u.values[i] +
                      2.0 * st.w->c_far(i) * (u.values[i] - u.far_value);
        for (int j = 0; j < st.w->size(); ++j)
            if (j != i) want -= 2.0 * st.w->w(i, j) * u.values[j];
        CHECK(res.r[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("E(u, e_i) equals the nodal residual") {
    auto st = make_setup(0.45, 2.5, 6);
    auto gen = testutil::rng(17);
    Field u = random_field(st.grid, gen);
    auto res = apply_operator(u, *st.w, st.omega);
    for (int i : st.omega.indices()) {
        Field e(st.grid, 0.0, 0.0);
        e.values[i] = 1.0;
        CHECK(energy_form(u, e, *st.w, st.omega) == doctest::Approx(res.r[i]).epsilon(1e-12));
    }
}

TEST_CASE("single interior node between 0 and 1 balances at 0.5") {
    for (double p : {1.5, 2.0, 3.0}) {
        auto grid = build_grid(1, {-0.75, 0.75}, {0.0, 0.0}, 0.5);
        auto w = assemble_weights(grid, params(0.5, p));
        NodeSet omega(grid, SetRole::Domain);
        omega.add(1);
        Field u(grid, 0.0, 0.5);
        u.values = {0.0, 0.5, 1.0};
        // by symmetry of the data around the middle node
        CHECK(nodal_residual(u, *w, 1) == doctest::Approx(0.0).epsilon(1e-13));
        u.values[1] = 0.3;
        CHECK(nodal_residual(u, *w, 1) < 0.0);
    }
}

TEST_CASE("bilinearity in the second argument") {
    auto st = make_setup(0.35, 2.2, 6);
    auto gen = testutil::rng(19);
    for (int rep = 0; rep < 5; ++rep) {
        Field u = random_field(st.grid, gen);
        Field v1 = random_field(st.grid, gen);
        Field v2 = random_field(st.grid, gen);
        const double a = testutil::uniform(gen, -2.0, 2.0);
        const double b = testutil::uniform(gen, -2.0, 2.0);
        Field combo = v1;
        for (int i = 0; i < combo.size(); ++i)
            combo.values[i] = a * v1.values[i] + b * v2.values[i];
        combo.far_value = a * v1.far_value + b * v2.far_value;
        const double lhs = energy_form(u, combo, *st.w, st.omega);
        const double rhs = a * energy_form(u, v1, *st.w, st.omega) +
                           b * energy_form(u, v2, *st.w, st.omega);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("energy is convex along segments") {
    auto gen = testutil::rng(23);
    for (double p : {1.5, 2.0, 3.0}) {
        auto st = make_setup(0.4, p, 6);
        for (int rep = 0; rep < 5; ++rep) {
            Field u = random_field(st.grid, gen);
            Field v = random_field(st.grid, gen);
            const double eu = energy(u, *st.w, st.omega);
            const double ev = energy(v, *st.w, st.omega);
            for (double t : {0.25, 0.5, 0.75}) {
                Field mix = u;
                for (int i = 0; i < mix.size(); ++i)
                    mix.values[i] = t * u.values[i] + (1.0 - t) * v.values[i];
                mix.far_value = t * u.far_value + (1.0 - t) * v.far_value;
                CHECK(energy(mix, *st.w, st.omega) <= t * eu + (1.0 - t) * ev + 1e-10);
            }
        }
    }
}

TEST_CASE("residual equals energy differential (factor p normalization)") {
    auto gen = testutil::rng(29);
    // d/dt energy(u + t e_i) = p * r_i; checked by central differences
    for (double p : {2.0, 3.0}) {
        auto st = make_setup(0.4, p, 6);
        Field u = random_field(st.grid, gen);
        auto res = apply_operator(u, *st.w, st.omega);
        const double eps = 1e-6;
        for (int i : st.omega.indices()) {
            Field up = u, dn = u;
            up.values[i] += eps;
            dn.values[i] -= eps;
            const double fd =
                (energy(up, *st.w, st.omega) - energy(dn, *st.w, st.omega)) / (2.0 * eps);
            CHECK(fd / p == doctest::Approx(res.r[i]).epsilon(1e-5));
        }
    }
    // p = 1.5: looser tolerance, skip kink pairs
    {
        auto st = make_setup(0.4, 1.5, 6);
        Field u = random_field(st.grid, gen);
        auto res = apply_operator(u, *st.w, st.omega);
        const double eps = 1e-7;
        for (int i : st.omega.indices()) {
            bool kink = std::abs(u.values[i] - u.far_value) < 1e-9;
            for (int j = 0; j < st.w->size() && !kink; ++j)
                if (j != i && std::abs(u.values[i] - u.values[j]) < 1e-9) kink = true;
            if (kink) continue;
            Field up = u, dn = u;
            up.values[i] += eps;
            dn.values[i] -= eps;
            const double fd =
                (energy(up, *st.w, st.omega) - energy(dn, *st.w, st.omega)) / (2.0 * eps);
            CHECK(fd / 1.5 == doctest::Approx(res.r[i]).epsilon(1e-3));
        }
    }
}

TEST_CASE("classify_node basics") {
    auto st = make_setup(0.5, 2.0, 8);
    Field c(st.grid, 1.0, 1.0);
    for (int i : st.omega.indices())
        CHECK(classify_node(c, i, *st.w, st.omega, 1e-12) == NodeClass::HarmonicLike);

    // strict local max: all differences positive
    auto gen = testutil::rng(31);
    Field u(st.grid, 0.0, 0.0);
    const int mid = st.omega.indices()[st.omega.count() / 2];
    u.values[mid] = 2.0;
    CHECK(classify_node(u, mid, *st.w, st.omega, 1e-12) == NodeClass::SupersolutionLike);
    u.values[mid] = -2.0;
    CHECK(classify_node(u, mid, *st.w, st.omega, 1e-12) == NodeClass::SubsolutionLike);

    // not interior
    int outside = -1;
    for (int i = 0; i < st.grid->size(); ++i)
        if (!st.omega.contains(i)) outside = i;
    CHECK_THROWS_AS(classify_node(u, outside, *st.w, st.omega, 1e-12), ConfigError);
    (void)gen;
}

TEST_CASE("harmonic-like iff both u and -u are supersolution-like") {
    auto st = make_setup(0.4, 2.5, 8);
    auto gen = testutil::rng(37);
    const double tol = 1e-9;
    for (int rep = 0; rep < 20; ++rep) {
        Field u = random_field(st.grid, gen);
        Field neg = u;
        for (auto& v : neg.values) v = -v;
        neg.far_value = -neg.far_value;
        for (int i : st.omega.indices()) {
            const auto cu = classify_node(u, i, *st.w, st.omega, tol);
            const auto cn = classify_node(neg, i, *st.w, st.omega, tol);
            const bool both_super = (cu == NodeClass::SupersolutionLike ||
                                     cu == NodeClass::HarmonicLike) &&
                                    (cn == NodeClass::SupersolutionLike ||
                                     cn == NodeClass::HarmonicLike);
            CHECK(both_super == (cu == NodeClass::HarmonicLike));
        }
    }
}
