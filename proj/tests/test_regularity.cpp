#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regularity.hpp"
#include "test_helpers.hpp"

using namespace fracperron;

namespace {

FracParams params(double s, double p) {
    FracParams fp;
    fp.s = s;
    fp.p = p;
    return fp;
}

}  // namespace

TEST_CASE("wiener profile: cone complement keeps terms bounded below") {
    // interval endpoint: the complement contains a half-line
    const auto shape = parse_shape("rect(-0.6,0.6)", 1);
    const auto profile = wiener_profile({-0.6, 0.0}, *shape, 1, params(0.4, 2.0), 0.2, 4);
    REQUIRE(profile.levels() == 5);
    REQUIRE_FALSE(profile.resolution_flag);
    const double c = profile.terms.front();
    CHECK(c > 0.0);
    for (double t : profile.terms) CHECK(t >= 0.5 * c);
    // partial sums grow roughly linearly in the level
    for (int j = 1; j < profile.levels(); ++j)
        CHECK(profile.partial_sums[j] > profile.partial_sums[j - 1]);
    CHECK(profile.partial_sums.back() >=
          0.8 * profile.levels() * profile.terms.front() * std::log(2.0));
}

TEST_CASE("wiener profile: isolated puncture has zero capacity density") {
    const auto shape = parse_shape("diff(rect(-0.6,0.6),puncture(0))", 1);
    const auto profile = wiener_profile({0.0, 0.0}, *shape, 1, params(0.4, 2.0), 0.2, 4);
    REQUIRE(profile.levels() == 5);
    for (double t : profile.terms) CHECK(t == 0.0);
    CHECK(profile.partial_sums.back() == 0.0);
}

TEST_CASE("wiener profile: full complement dominates every other domain") {
    // x0 on the boundary of an interval vs x0 with the whole line removed
    const auto half = parse_shape("rect(-0.6,0.6)", 1);
    const auto nothing = parse_shape("empty", 1);
    const auto fp = params(0.45, 2.0);
    const auto p_half = wiener_profile({-0.6, 0.0}, *half, 1, fp, 0.2, 3);
    const auto p_full = wiener_profile({-0.6, 0.0}, *nothing, 1, fp, 0.2, 3);
    REQUIRE(p_half.levels() == p_full.levels());
    for (int j = 0; j < p_half.levels(); ++j) CHECK(p_full.terms[j] >= p_half.terms[j] - 1e-12);
}

TEST_CASE("wiener terms are scale invariant") {
    const auto fp = params(0.4, 2.0);
    const auto s1 = parse_shape("rect(-0.6,0.6)", 1);
    const auto s2 = parse_shape("rect(-1.2,1.2)", 1);
    const auto a = wiener_profile({-0.6, 0.0}, *s1, 1, fp, 0.2, 3);
    const auto b = wiener_profile({-1.2, 0.0}, *s2, 1, fp, 0.4, 3);
    REQUIRE(a.levels() == b.levels());
    for (int j = 0; j < a.levels(); ++j)
        CHECK(a.terms[j] == doctest::Approx(b.terms[j]).epsilon(1e-6));
}

TEST_CASE("wiener profile: tiny r0 truncates with a resolution flag") {
    const auto shape = parse_shape("rect(-0.6,0.6)", 1);
    const auto profile = wiener_profile({-0.6, 0.0}, *shape, 1, params(0.4, 2.0), 1e-11, 4);
    CHECK(profile.resolution_flag);
    CHECK(profile.levels() < 5);
}

TEST_CASE("barrier solution: no interior nodes returns d itself") {
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.25);
    auto w = assemble_weights(grid, params(0.5, 2.0));
    NodeSet empty(grid, SetRole::Domain);
    auto out = barrier_solution({0.125, 0.0}, empty, *w);
    CHECK(out.rescale == 1.0);
    for (int i = 0; i < grid->size(); ++i)
        CHECK(out.field.values[i] ==
              doctest::Approx(std::min(1.0, std::abs(grid->coord(i)[0] - 0.125))));
    CHECK(out.field.far_value == 1.0);
}

TEST_CASE("barrier solution is nonnegative and bounded by one") {
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.1);
    auto w = assemble_weights(grid, params(0.4, 2.0));
    auto omega = rasterize("rect(-0.6,0.6)", grid);
    auto out = barrier_solution({-0.6, 0.0}, omega, *w);
    for (double v : out.field.values) {
        CHECK(v >= -1e-9);
        CHECK(v <= 1.0 + 1e-9);
    }
}

TEST_CASE("barrier rescales when the box cannot saturate d") {
    auto grid = build_grid(1, {-0.2, 0.2}, {0.0, 0.0}, 0.05);
    auto w = assemble_weights(grid, params(0.5, 2.0));
    auto omega = rasterize("rect(-0.1,0.1)", grid);
    auto out = barrier_solution({-0.1, 0.0}, omega, *w);
    CHECK(out.rescale == doctest::Approx(1.5 / 0.3));
    for (double v : out.field.values) CHECK(v <= 1.0 + 1e-9);
}

TEST_CASE("barrier monotone: cone-touched point sits below isolated puncture") {
    // same base interval, removed set at x0 either a fat segment or the point
    const auto fp = params(0.4, 2.0);
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.08);
    auto w = assemble_weights(grid, fp);
    auto omega_cone = rasterize("diff(rect(-0.6,0.6),rect(-0.2,0))", grid);
    auto omega_punct = rasterize("diff(rect(-0.6,0.6),puncture(0))", grid);
    auto cone = barrier_solution({0.0, 0.0}, omega_cone, *w);
    auto punct = barrier_solution({0.0, 0.0}, omega_punct, *w);
    double cone_near = 0.0, punct_near = 0.0;
    for (int i = 0; i < grid->size(); ++i) {
        const double d = std::abs(grid->coord(i)[0]);
        if (d > 0.16 + 1e-12) continue;
        if (omega_cone.contains(i)) cone_near = std::max(cone_near, cone.field.values[i]);
        if (omega_punct.contains(i)) punct_near = std::max(punct_near, punct.field.values[i]);
    }
    CHECK(cone_near <= punct_near);
}

TEST_CASE("classification of the canonical geometries") {
    RegOpts opts;
    {
        // square corner, n = 2, s = 0.5, p = 2
        const auto fp = params(0.5, 2.0);
        auto grid = build_grid(2, {-1.0, 1.0}, {-1.0, 1.0}, 0.125);
        auto shape = parse_shape("rect(-0.5,-0.5,0.5,0.5)", 2);
        auto w = assemble_weights(grid, fp);
        auto v = classify({-0.5, -0.5}, *shape, grid, *w, fp, opts);
        CHECK(v.verdict == Verdict::Regular);
        CHECK_FALSE(v.notes.empty());
    }
    {
        // punctured interval, sp = 0.8 <= 1
        const auto fp = params(0.4, 2.0);
        auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 2.0 / 41.0);
        auto shape = parse_shape("diff(rect(-0.6,0.6),puncture(0))", 1);
        auto w = assemble_weights(grid, fp);
        auto v = classify({0.0, 0.0}, *shape, grid, *w, fp, opts);
        CHECK(v.verdict == Verdict::Irregular);
    }
    {
        // sp > n: every boundary point regular
        const auto fp = params(0.9, 2.0);
        auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 2.0 / 41.0);
        auto shape = parse_shape("diff(rect(-0.6,0.6),puncture(0))", 1);
        auto w = assemble_weights(grid, fp);
        auto v = classify({0.0, 0.0}, *shape, grid, *w, fp, opts);
        CHECK(v.verdict == Verdict::Regular);
    }
}

TEST_CASE("classify rejects off-lattice and interior points") {
    const auto fp = params(0.5, 2.0);
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.1);
    auto shape = parse_shape("rect(-0.6,0.6)", 1);
    auto w = assemble_weights(grid, fp);
    CHECK_THROWS_AS(classify({-0.613, 0.0}, *shape, grid, *w, fp, RegOpts{}), ConfigError);
    CHECK_THROWS_AS(classify({0.0, 0.0}, *shape, grid, *w, fp, RegOpts{}), ConfigError);
}

TEST_CASE("wiener locality: modification far from x0 leaves the profile unchanged") {
    const auto fp = params(0.4, 2.0);
    const auto base = parse_shape("rect(-0.6,0.6)", 1);
    const auto modified = parse_shape("diff(rect(-0.6,0.6),cball(0.45,0.05))", 1);
    const double r0 = 0.1;  // modification lies outside B(x0, 4 r0)
    const auto a = wiener_profile({-0.6, 0.0}, *base, 1, fp, r0, 3);
    const auto b = wiener_profile({-0.6, 0.0}, *modified, 1, fp, r0, 3);
    REQUIRE(a.levels() == b.levels());
    for (int j = 0; j < a.levels(); ++j) CHECK(a.terms[j] == b.terms[j]);
}

TEST_CASE("barrier locality within twice the barrier tolerance") {
    const auto fp = params(0.4, 2.0);
    RegOpts opts;
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.05);
    auto w = assemble_weights(grid, fp);
    auto omega_a = rasterize("rect(-0.6,0.6)", grid);
    auto omega_b = rasterize("diff(rect(-0.6,0.6),cball(0.45,0.049))", grid);
    auto ba = barrier_solution({-0.6, 0.0}, omega_a, *w);
    auto bb = barrier_solution({-0.6, 0.0}, omega_b, *w);
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < grid->size(); ++i) {
        if (std::abs(grid->coord(i)[0] + 0.6) > 0.1 + 1e-12) continue;
        if (omega_a.contains(i)) ma = std::max(ma, ba.field.values[i]);
        if (omega_b.contains(i)) mb = std::max(mb, bb.field.values[i]);
    }
    CHECK(std::abs(ma - mb) <= 2.0 * opts.barrier_tol);
}

TEST_CASE("subset monotonicity near x0") {
    // G removes a piece close to x0 where d_{x0} stays below the omega
    // solution, so the comparison argument applies
    const auto fp = params(0.4, 2.0);
    auto grid = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.05);
    auto w = assemble_weights(grid, fp);
    auto omega = rasterize("rect(-0.6,0.6)", grid);
    auto sub = rasterize("diff(rect(-0.6,0.6),cball(-0.4,0.1))", grid);
    auto b_omega = barrier_solution({-0.6, 0.0}, omega, *w);
    auto b_sub = barrier_solution({-0.6, 0.0}, sub, *w);
    const double tol = 1e-8;
    for (int i = 0; i < grid->size(); ++i) {
        if (!sub.contains(i)) continue;
        if (std::abs(grid->coord(i)[0] + 0.6) > 0.1 + 1e-12) continue;
        CHECK(b_sub.field.values[i] <= b_omega.field.values[i] + 2.0 * tol);
    }
}
