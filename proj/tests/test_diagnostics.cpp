#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlslab/diagnostics.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/solitons.hpp"

#include <cmath>

using namespace nlslab;

TEST_CASE("decay fit: exact power law, constants, invariances, validation") {
    std::vector<double> t, v, c, v_scaled;
    for (int i = 0; i <= 40; ++i) {
        t.push_back(0.5 * i);
        v.push_back(std::pow(1.0 + t.back(), -0.5));
        c.push_back(3.7);
        v_scaled.push_back(123.0 * v.back());
    }
    DecayFit f = fit_decay_exponent(t, v, 0.0, 20.0);
    CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(f.r_squared > 1.0 - 1e-12);

    DecayFit fc = fit_decay_exponent(t, c, 0.0, 20.0);
    CHECK(std::abs(fc.exponent) <= 1e-12);

    DecayFit fs = fit_decay_exponent(t, v_scaled, 0.0, 20.0);
    CHECK(std::abs(fs.exponent - f.exponent) <= 1e-12);
    CHECK(fs.intercept != doctest::Approx(f.intercept));

    CHECK_THROWS_AS(fit_decay_exponent(t, v, 0.0, 2.0), std::invalid_argument);
    std::vector<double> bad = v;
    bad[5] = 0.0;
    CHECK_THROWS_AS(fit_decay_exponent(t, bad, 0.0, 20.0), std::invalid_argument);
}

TEST_CASE("free Gaussian peak decays like t^{-1/2}") {
    auto g = Grid::make(800.0, 8192);
    ComplexField f(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        f[j] = std::exp(-x * x);
    }
    std::vector<double> t, v;
    for (int i = 1; i <= 50; ++i) {
        t.push_back(static_cast<double>(i));
        v.push_back(linf_norm(free_propagator(f, t.back())));
    }
    DecayFit fit = fit_decay_exponent(t, v, 1.0, 50.0);
    CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(0.1)); // -0.50 +- 0.05
}

TEST_CASE("interaction scan: rate near min alpha, weighted within 10%") {
    auto g = Grid::make(40.0, 4096);
    std::vector<double> seps;
    for (double L = 10.0; L <= 35.0; L += 2.5) seps.push_back(L);
    InteractionScan scan = interaction_scan(3.0, 1.0, seps, g);

    for (size_t i = 1; i < scan.points.size(); ++i) {
        CHECK(scan.points[i].l1 < scan.points[i - 1].l1);
        CHECK(scan.points[i].l2 < scan.points[i - 1].l2);
    }
    CHECK(scan.rate_l1 >= 0.9);
    CHECK(scan.rate_l1 <= 1.1);
    CHECK(scan.rate_l2 >= 0.9);
    CHECK(scan.rate_l2 <= 1.1);
    CHECK(std::abs(scan.rate_l1_weighted - scan.rate_l1) <= 0.1 * scan.rate_l1);
    CHECK(std::abs(scan.rate_l2_weighted - scan.rate_l2) <= 0.1 * scan.rate_l2);
}

TEST_CASE("interaction rate is monotone in alpha; underflow points dropped") {
    auto g = Grid::make(40.0, 2048);
    std::vector<double> seps = {12.0, 16.0, 20.0, 24.0, 28.0};
    double prev = 0.0;
    for (double a : {0.8, 1.0, 1.2}) {
        InteractionScan scan = interaction_scan(3.0, a, seps, g);
        CHECK(scan.rate_l2 > prev);
        prev = scan.rate_l2;
    }
    InteractionScan far = interaction_scan(3.0, 1.0, {16.0, 1500.0}, g);
    CHECK_FALSE(far.points[0].dropped);
    CHECK(far.points[1].dropped);
}

TEST_CASE("interactt lemma: closed-form oracle and ratio bounds") {
    // m = 0, alpha = beta = 1: integral is exactly (2 + zeta) e^{-zeta}
    std::vector<double> zs = {0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
    BoundCheckReport rep = verify_interactt(1.0, 1.0, 0.0, zs);
    for (const auto& pt : rep.points) {
        const double exact = (2.0 + pt.arg) * std::exp(-pt.arg);
        CHECK(std::abs(pt.integral - exact) / exact <= 1e-10);
    }

    // generic exponents: ratio to the majorant bounded above, away from zero
    std::vector<double> grid;
    for (double z = 1.0; z <= 40.0; z += 1.0) grid.push_back(z);
    BoundCheckReport r2 = verify_interactt(1.0, 2.0, 2.0, grid);
    MESSAGE("interactt alpha=1 beta=2 m=2: ratio in [", r2.min_ratio, ", ",
            r2.max_ratio, "]");
    CHECK(r2.max_ratio < 50.0);
    CHECK(r2.min_ratio > 1e-3);

    // equal-exponent branch
    BoundCheckReport r3 = verify_interactt(1.3, 1.3, 1.0, grid);
    CHECK(r3.max_ratio < 50.0);
    CHECK(r3.min_ratio > 1e-3);

    // no singularity as zeta -> 0+
    BoundCheckReport r4 = verify_interactt(1.0, 2.0, 2.0, {1e-8});
    CHECK(std::isfinite(r4.points[0].integral));
    CHECK(r4.points[0].integral > 0.0);

    CHECK_THROWS_AS(verify_interactt(-1.0, 1.0, 0.0, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_interactt(1.0, 1.0, 0.0, {-1.0}),
                    std::invalid_argument);
}

TEST_CASE("interpol lemma: exact case, power branch, log branches") {
    // a = b = 0: integral equals t
    BoundCheckReport r0 = verify_interpol(0.0, 0.0, {3.0, 7.0});
    CHECK(r0.points[0].integral == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r0.points[1].integral == doctest::Approx(7.0).epsilon(1e-12));

    std::vector<double> ts;
    for (double t = 10.0; t <= 1e4; t *= 2.0) ts.push_back(t);

    BoundCheckReport r1 = verify_interpol(1.5, 0.5, ts);
    MESSAGE("interpol a=3/2 b=1/2: ratio in [", r1.min_ratio, ", ",
            r1.max_ratio, "]");
    CHECK(r1.max_ratio < 20.0);
    CHECK(r1.min_ratio > 0.05);

    BoundCheckReport rb = verify_interpol(1.5, 1.0, ts); // b = 1 log branch
    CHECK(rb.max_ratio < 20.0);
    CHECK(rb.min_ratio > 0.05);

    BoundCheckReport ra = verify_interpol(1.0, 1.5, ts); // a = 1 log branch
    CHECK(ra.max_ratio < 20.0);
    CHECK(ra.min_ratio > 0.05);
}

TEST_CASE("conserved quantities: momentum, mass scaling, energy refinement") {
    auto g = Grid::make(30.0, 1024);
    GroundStateResult phi1 = ground_state(1.0, 3.0, g);
    ConservedQuantities q1 = conserved_quantities(phi1.phi, 3.0);
    CHECK(std::abs(q1.momentum) <= 1e-13);

    // mass(phi_alpha) = alpha^{2/k - 1} mass(phi_1)
    GroundStateResult phi2 = ground_state(2.0, 3.0, g);
    ConservedQuantities q2 = conserved_quantities(phi2.phi, 3.0);
    CHECK(q2.mass == doctest::Approx(std::pow(2.0, 2.0 / 3.0 - 1.0) * q1.mass)
                         .epsilon(1e-10));

    // moving soliton has momentum v * mass / 2
    ComplexField w = solitary_wave(SolitonParams{0.8, 0.0, 1.0, 0.0}, 3.0, 0.0, g);
    ConservedQuantities qw = conserved_quantities(w, 3.0);
    CHECK(qw.momentum == doctest::Approx(0.4 * qw.mass).epsilon(1e-10));

    // energy stable under grid refinement
    auto g2 = Grid::make(30.0, 2048);
    ComplexField f1(g), f2(g2);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        f1[j] = std::exp(-0.5 * x * x) * cd(1.0, 0.3);
    }
    for (int j = 0; j < g2->n(); ++j) {
        const double x = g2->node(j);
        f2[j] = std::exp(-0.5 * x * x) * cd(1.0, 0.3);
    }
    const double e1 = conserved_quantities(f1, 3.0).energy;
    const double e2 = conserved_quantities(f2, 3.0).energy;
    CHECK(std::abs(e1 - e2) <= 1e-8);
}
