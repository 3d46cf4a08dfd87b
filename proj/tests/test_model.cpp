#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "model.hpp"
#include "shape.hpp"

using namespace fracperron;

namespace {

FracParams params(double s, double p, double lambda = 1.0) {
    FracParams fp;
    fp.s = s;
    fp.p = p;
    fp.lambda = lambda;
    return fp;
}

// Exact double integral of the standard kernel over two 1D cells, by
// adaptive Simpson on the inner antiderivative-free form.
double exact_pair_integral_1d(double c1, double c2, double h, double exponent) {
    // int_{c1-h/2}^{c1+h/2} int_{c2-h/2}^{c2+h/2} |x-y|^-exponent dy dx
    auto inner = [&](double x) {
        const int steps = 4000;
        const double a = c2 - h / 2.0, b = c2 + h / 2.0;
        double acc = 0.0;
        const double dy = (b - a) / steps;
        for (int k = 0; k < steps; ++k) {
            const double y = a + (k + 0.5) * dy;
            acc += std::pow(std::abs(x - y), -exponent) * dy;
        }
        return acc;
    };
    const int steps = 4000;
    const double a = c1 - h / 2.0, b = c1 + h / 2.0;
    double acc = 0.0;
    const double dx = (b - a) / steps;
    for (int k = 0; k < steps; ++k) acc += inner(a + (k + 0.5) * dx) * dx;
    return acc;
}

}  // namespace

TEST_CASE("grid 1d cell centers") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    REQUIRE(g->size() == 4);
    CHECK(g->coord(0)[0] == doctest::Approx(-0.75).epsilon(1e-15));
    CHECK(g->coord(1)[0] == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(g->coord(2)[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g->coord(3)[0] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("grid 2d node count and ordering") {
    auto g = build_grid(2, {0.0, 1.0}, {0.0, 1.0}, 0.5);
    REQUIRE(g->size() == 4);
    // row-major, x fastest
    CHECK(g->coord(0)[0] == doctest::Approx(0.25));
    CHECK(g->coord(0)[1] == doctest::Approx(0.25));
    CHECK(g->coord(1)[0] == doctest::Approx(0.75));
    CHECK(g->coord(1)[1] == doctest::Approx(0.25));
}

TEST_CASE("grid errors") {
    CHECK_THROWS_AS(build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.3), SizeError);
    CHECK_THROWS_AS(build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, -0.1), SizeError);
    CHECK_THROWS_AS(build_grid(1, {1.0, 1.0}, {0.0, 0.0}, 0.5), SizeError);
    CHECK_THROWS_AS(build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5, 2), SizeError);
}

TEST_CASE("rasterize ball on coarse interval") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    auto set = rasterize("ball(0,0.6)", g);
    CHECK(set.indices() == std::vector<int>{1, 2});
}

TEST_CASE("rasterize rect minus puncture excludes the node") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.25);
    // node centers are at -0.875, ..., 0.875; 0.125 is one of them
    auto with = rasterize("rect(-0.5,0.5)", g);
    auto without = rasterize("diff(rect(-0.5,0.5),puncture(0.125))", g);
    CHECK(with.count() == without.count() + 1);
    bool found = false;
    for (int i : with.indices())
        if (g->coord(i)[0] == doctest::Approx(0.125)) found = !without.contains(i);
    CHECK(found);
}

TEST_CASE("rasterize empty intersection") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    auto set = rasterize("inter(ball(-0.9,0.1),ball(0.9,0.1))", g);
    CHECK(set.empty());
}

TEST_CASE("shape parse error carries position") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    try {
        rasterize("union(ball(0,0.5),quux(1))", g);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }
}

TEST_CASE("near-pair weight approximates the exact double integral") {
    // two 1D cells centered 1.0 apart, h = 0.5, s = 0.5, p = 2 (n+sp = 2)
    auto g = build_grid(1, {-0.75, 0.75}, {0.0, 0.0}, 0.5);
    REQUIRE(g->size() == 3);
    auto w = assemble_weights(g, params(0.5, 2.0));
    const double exact = exact_pair_integral_1d(-0.5, 0.5, 0.5, 2.0);
    // midpoint would give h^2 |dx|^-2 = 0.25; both it and the Gauss rule used
    // at this distance must sit within 15% of the exact integral
    CHECK(std::abs(0.25 - exact) <= 0.15 * exact);
    CHECK(std::abs(w->w(0, 2) - exact) <= 0.15 * exact);
}

TEST_CASE("far-field integral closed form") {
    // node at 0 in box [-1,1], sp = 1: int_{|y|>1} |y|^-2 dy = 2
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    CHECK(far_field_integral(*g, {0.0, 0.0}, params(0.5, 2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    // stored coefficient absorbs the cell measure
    auto w = assemble_weights(g, params(0.5, 2.0));
    const double integral = far_field_integral(*g, g->coord(1), params(0.5, 2.0));
    CHECK(w->c_far(1) == doctest::Approx(0.5 * integral).epsilon(1e-12));
}

TEST_CASE("far-field integral 2d matches the radial bound structure") {
    auto g = build_grid(2, {-1.0, 1.0}, {-1.0, 1.0}, 0.5);
    FracParams fp = params(0.5, 2.0);
    const double sp = 1.0;
    const double v = far_field_integral(*g, {0.0, 0.0}, fp);
    // between the inscribed and circumscribed disk tails: 2 pi R^-sp / sp
    const double pi = std::acos(-1.0);
    const double outer = 2.0 * pi * std::pow(1.0, -sp) / sp;
    const double inner = 2.0 * pi * std::pow(std::sqrt(2.0), -sp) / sp;
    CHECK(v < outer);
    CHECK(v > inner);
}

TEST_CASE("custom kernel zero violates ellipticity") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.5);
    FracParams fp = params(0.5, 2.0, 2.0);
    fp.kernel = [](double) { return 0.0; };
    CHECK_THROWS_AS(assemble_weights(g, fp), EllipticityError);
}

TEST_CASE("custom kernel within bounds is lambda-comparable to standard") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.25);
    FracParams std_p = params(0.4, 2.0);
    FracParams cus = params(0.4, 2.0, 2.0);
    cus.kernel = [](double r) { return 1.5 * std::pow(r, -1.8); };
    auto ws = assemble_weights(g, std_p);
    auto wc = assemble_weights(g, cus);
    for (int i = 0; i < g->size(); ++i)
        for (int j = 0; j < g->size(); ++j) {
            if (i == j) continue;
            CHECK(wc->w(i, j) >= ws->w(i, j) / 2.0 - 1e-15);
            CHECK(wc->w(i, j) <= ws->w(i, j) * 2.0 + 1e-15);
        }
}

TEST_CASE("weights symmetric and monotone in distance") {
    auto g = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.125);
    auto w = assemble_weights(g, params(0.3, 2.5));
    const int n = g->size();
    for (int i = 0; i < n; ++i) {
        CHECK(w->c_far(i) > 0.0);
        for (int j = 0; j < n; ++j) CHECK(w->w(i, j) == w->w(j, i));
    }
    // equal cells: shorter distance, larger weight
    for (int d = 1; d + 1 < n; ++d) CHECK(w->w(0, d) >= w->w(0, d + 1));
}

TEST_CASE("refinement consistency for separated pairs") {
    const double h = 0.25;
    auto coarse = build_grid(1, {0.0, 2.0}, {0.0, 0.0}, h);
    auto fine = build_grid(1, {0.0, 2.0}, {0.0, 0.0}, h / 2.0);
    auto wc = assemble_weights(coarse, params(0.45, 2.0));
    auto wf = assemble_weights(fine, params(0.45, 2.0));
    // coarse cell i covers fine cells {2i, 2i+1}
    for (int i = 0; i < coarse->size(); ++i)
        for (int j = 0; j < coarse->size(); ++j) {
            const double dist = std::abs(coarse->coord(i)[0] - coarse->coord(j)[0]);
            if (dist < 3.0 * h) continue;
            double sum = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) sum += wf->w(2 * i + a, 2 * j + b);
            CHECK(std::abs(sum - wc->w(i, j)) <= 0.05 * wc->w(i, j));
        }
}

TEST_CASE("scaling law at t = 2") {
    const double s = 0.4, p = 2.0;
    auto g1 = build_grid(1, {-1.0, 1.0}, {0.0, 0.0}, 0.25);
    auto g2 = build_grid(1, {-2.0, 2.0}, {0.0, 0.0}, 0.5);
    auto w1 = assemble_weights(g1, params(s, p));
    auto w2 = assemble_weights(g2, params(s, p));
    const double factor = std::pow(2.0, 1.0 - s * p);
    for (int i = 0; i < g1->size(); ++i) {
        CHECK(w2->c_far(i) == doctest::Approx(factor * w1->c_far(i)).epsilon(1e-10));
        for (int j = 0; j < g1->size(); ++j) {
            if (i == j) continue;
            CHECK(w2->w(i, j) == doctest::Approx(factor * w1->w(i, j)).epsilon(1e-10));
        }
    }
    // the scaled-copy constructor reproduces a fresh assembly
    WeightMatrix transferred(g2, *w1, 2.0);
    for (int i = 0; i < g1->size(); ++i)
        for (int j = 0; j < g1->size(); ++j)
            CHECK(transferred.w(i, j) == doctest::Approx(w2->w(i, j)).epsilon(1e-10));
}
