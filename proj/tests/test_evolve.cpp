#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/solitons.hpp"

#include <cmath>
#include <complex>

using namespace nlslab;

namespace {

ComplexField gaussian(const GridPtr& g, double a, double x0 = 0.0,
                      double xi0 = 0.0) {
    ComplexField f(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        f[j] = std::exp(-a * (x - x0) * (x - x0)) * std::polar(1.0, xi0 * x);
    }
    return f;
}

double rel_l2_error(const ComplexField& a, const ComplexField& b) {
    ComplexField d = a;
    d -= b;
    return l2_norm(d) / l2_norm(b);
}

} // namespace

TEST_CASE("free propagator: Gaussian closed form, unitarity, group law") {
    auto g = Grid::make(40.0, 1024);
    const double a = 0.5;
    ComplexField f = gaussian(g, a);

    for (double t : {0.3, 1.0, 2.5}) {
        ComplexField u = free_propagator(f, t);
        CHECK(l2_norm(u) == doctest::Approx(l2_norm(f)).epsilon(1e-12));

        // e^{it d2} e^{-a x^2} = (1+4iat)^{-1/2} e^{-a x^2/(1+4iat)}
        const cd den(1.0, 4.0 * a * t);
        const cd pre = 1.0 / std::sqrt(den);
        double err = 0.0;
        for (int j = 0; j < g->n(); ++j) {
            const double x = g->node(j);
            const cd exact = pre * std::exp(-a * x * x / den);
            err = std::max(err, std::abs(u[j] - exact));
        }
        CHECK(err <= 1e-12);
    }

    // identity at t = 0 and composition
    CHECK(rel_l2_error(free_propagator(f, 0.0), f) <= 1e-14);
    ComplexField two_leg = free_propagator(free_propagator(f, 0.7), 0.9);
    CHECK(rel_l2_error(two_leg, free_propagator(f, 1.6)) <= 1e-12);
}

TEST_CASE("free propagator: t^{-1/2} peak decay") {
    auto g = Grid::make(400.0, 8192);
    ComplexField f = gaussian(g, 1.0);
    // |u(t)|_inf = (1+16t^2)^{-1/4} exactly for a = 1
    for (double t : {1.0, 4.0, 16.0}) {
        ComplexField u = free_propagator(f, t);
        const double expected = std::pow(1.0 + 16.0 * t * t, -0.25);
        CHECK(linf_norm(u) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("nls step: second-order convergence to the exact solitary wave") {
    auto g = Grid::make(30.0, 512);
    SolitonParams p{1.0, 0.0, 1.0, 0.3};
    const double k = 3.0, T = 0.5;

    auto run = [&](double dt) {
        ComplexField psi = solitary_wave(p, k, 0.0, g);
        const int n = static_cast<int>(std::llround(T / dt));
        for (int s = 0; s < n; ++s) psi = step_nls(psi, dt, k);
        ComplexField exact = solitary_wave(p, k, T, g);
        psi -= exact;
        return l2_norm(psi);
    };

    const double e1 = run(2e-3);
    const double e2 = run(1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("nls step: exact mass conservation and bounded energy error") {
    auto g = Grid::make(30.0, 512);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.k = 3.0;
    ComplexField psi0 = solitary_wave(SolitonParams{0.5, 0.0, 1.0, 0.0},
                                      cfg.k, 0.0, g);
    TrajectoryRecord rec = evolve_nls(psi0, cfg);

    REQUIRE(rec.times.size() >= 2);
    CHECK(rec.times.front() == 0.0);
    CHECK(rec.times.back() == doctest::Approx(cfg.t_end).epsilon(1e-12));
    const double m0 = rec.mass.front();
    const double e0 = rec.energy.front();
    for (size_t i = 0; i < rec.times.size(); ++i) {
        CHECK(std::abs(rec.mass[i] - m0) / m0 <= 1e-12);
        // symmetric splitting: O(dt^2) oscillation, no drift
        CHECK(std::abs(rec.energy[i] - e0) / std::abs(e0) <= 1e-5);
    }
}

TEST_CASE("nls step: time reversibility") {
    auto g = Grid::make(30.0, 512);
    ComplexField psi0 = gaussian(g, 1.0, 0.0, 2.0);
    ComplexField psi = psi0;
    const double dt = 1e-2;
    for (int s = 0; s < 50; ++s) psi = step_nls(psi, dt, 3.0);
    for (int s = 0; s < 50; ++s) psi = step_nls(psi, -dt, 3.0);
    CHECK(rel_l2_error(psi, psi0) <= 1e-12);
}

TEST_CASE("evolve_nls: recording, callback, snapshots, argument checks") {
    auto g = Grid::make(20.0, 256);
    IntegratorConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.5;
    cfg.diag_stride = 10;
    cfg.snapshot_stride = 25;
    int calls = 0;
    TrajectoryRecord rec =
        evolve_nls(gaussian(g, 1.0), cfg,
                   [&](double, const ComplexField&) { ++calls; });
    CHECK(rec.times.size() == 6); // t = 0 plus every 10th of 50 steps
    CHECK(calls == static_cast<int>(rec.times.size()));
    CHECK(rec.snapshots.size() == 3); // t = 0, 0.25, 0.5
    CHECK(rec.snapshot_times.back() == doctest::Approx(0.5));
    CHECK(rec.mass.size() == rec.times.size());
    CHECK(rec.energy.size() == rec.times.size());
    CHECK(rec.linf.size() == rec.times.size());

    IntegratorConfig bad = cfg;
    bad.dt = 0.0;
    CHECK_THROWS_AS(evolve_nls(gaussian(g, 1.0), bad), std::invalid_argument);
}

TEST_CASE("nls sponge absorbs an outgoing packet") {
    auto g = Grid::make(20.0, 512);
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 6.0;
    cfg.sponge.enabled = true;
    cfg.sponge.width = 6.0;
    cfg.sponge.strength = 10.0;
    ComplexField psi0 = gaussian(g, 1.0, 0.0, 3.0); // group velocity 6
    TrajectoryRecord rec = evolve_nls(psi0, cfg);
    CHECK(rec.mass.back() <= 0.05 * rec.mass.front());

    cfg.sponge.enabled = false;
    TrajectoryRecord rec2 = evolve_nls(psi0, cfg);
    CHECK(std::abs(rec2.mass.back() - rec2.mass.front()) / rec2.mass.front() <=
          1e-12);
}

TEST_CASE("charge transfer: free flow recovered away from the potentials") {
    auto g = Grid::make(40.0, 1024);
    MultiSolitonConfig cfg;
    cfg.solitons = {SolitonParams{0.0, 15.0, 1.0, 0.0}};
    VectorField u(gaussian(g, 1.0, -15.0), gaussian(g, 2.0, -15.0));
    const double dt = 1e-2, T = 0.2;
    VectorField w = u;
    for (int s = 0; s < 20; ++s) w = step_charge_transfer(w, s * dt, dt, cfg);
    // sigma_z splits the components into e^{it d2} and e^{-it d2}
    CHECK(rel_l2_error(w.first, free_propagator(u.first, T)) <= 1e-12);
    CHECK(rel_l2_error(w.second, free_propagator(u.second, -T)) <= 1e-12);
}

TEST_CASE("charge transfer: conjugate-pair symmetry is preserved") {
    auto g = Grid::make(40.0, 512);
    MultiSolitonConfig cfg;
    cfg.solitons = {SolitonParams{2.0, 5.0, 1.5, 0.4},
                    SolitonParams{-1.0, -5.0, 1.0, 0.0}};
    VectorField u = as_pair(gaussian(g, 0.5, 0.0, 1.0));
    const double dt = 1e-3;
    for (int s = 0; s < 200; ++s) u = step_charge_transfer(u, s * dt, dt, cfg);
    CHECK(u.conjugate_pair_defect() <= 1e-10);
}

TEST_CASE("charge transfer: the unstable eigenmode grows at e^{lambda0 t}") {
    auto g = Grid::make(30.0, 512);
    MultiSolitonConfig cfg;
    cfg.solitons = {SolitonParams{0.0, 0.0, 1.0, 0.0}};
    const SpectralData& sd = spectral_data(1.0, 3.0, g);

    VectorField u = sd.Z_plus;
    const double dt = 1e-3, T = 0.5;
    for (int s = 0; s < 500; ++s) u = step_charge_transfer(u, s * dt, dt, cfg);
    CHECK(l2_norm(u) == doctest::Approx(std::exp(sd.lambda0 * T)).epsilon(1e-2));
}

TEST_CASE("charge transfer: blow-up guard trips on a diverging mode") {
    auto g = Grid::make(30.0, 512);
    MultiSolitonConfig cfg;
    cfg.solitons = {SolitonParams{0.0, 0.0, 1.0, 0.0}};
    const SpectralData& sd = spectral_data(1.0, 3.0, g);
    VectorField u = cd(1e7) * sd.Z_plus;
    const double dt = 1e-3;
    CHECK_THROWS_AS(
        [&] {
            for (int s = 0; s < 2000; ++s)
                u = step_charge_transfer(u, s * dt, dt, cfg);
        }(),
        BlowUpError);
}
