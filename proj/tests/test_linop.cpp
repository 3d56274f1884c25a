#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlslab/grid.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/solitons.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace nlslab;

namespace {
VectorField make_pair(const ComplexField& a, const ComplexField& b) {
    return VectorField(a, b);
}
} // namespace

TEST_CASE("kernel and generalized-kernel identities") {
    auto g = Grid::make(40.0, 2048);
    for (double alpha : {1.0, 2.0}) {
        const double k = 3.0;
        LinearizedOperator op = assemble_H(alpha, k, g);
        GroundStateFamily fam = ground_state_family(alpha, k, g);
        const cd i1(0.0, 1.0);

        // residuals measured on the de-aliased band (the raw residual at
        // alpha = 2 is dominated by the sampled tail of phi_2 folding back
        // under the spectral d2)
        auto dealiased_rel = [](VectorField diff, const VectorField& rhs) {
            diff.first = low_pass(diff.first, 0.5);
            diff.second = low_pass(diff.second, 0.5);
            return l2_norm(diff) / l2_norm(rhs);
        };

        // kernel: (phi', phi') and (i phi, -i phi)
        VectorField k1 = make_pair(fam.dphi_dx, fam.dphi_dx);
        VectorField k2 = make_pair(i1 * fam.phi, cd(-1.0) * i1 * fam.phi);
        CHECK(dealiased_rel(apply_H(op, k1), k1) <= 1e-8);
        CHECK(dealiased_rel(apply_H(op, k2), k2) <= 1e-8);

        // H (d_alpha phi, d_alpha phi) = -2 alpha (phi, -phi)
        VectorField r1 = make_pair(fam.dphi_dalpha, fam.dphi_dalpha);
        VectorField lhs = apply_H(op, r1);
        VectorField rhs = make_pair(cd(-2.0 * alpha) * fam.phi,
                                    cd(2.0 * alpha) * fam.phi);
        lhs -= rhs;
        CHECK(dealiased_rel(lhs, rhs) <= 1e-8);

        // H (x phi, -x phi) = -2 (phi', phi');
        // equivalently H (i x phi, -i x phi) = -2 i (phi', phi')
        VectorField r2 = make_pair(fam.x_phi, cd(-1.0) * fam.x_phi);
        VectorField lhs2 = apply_H(op, r2);
        VectorField rhs2 = make_pair(cd(-2.0) * fam.dphi_dx,
                                     cd(-2.0) * fam.dphi_dx);
        lhs2 -= rhs2;
        CHECK(dealiased_rel(lhs2, rhs2) <= 1e-8);

        VectorField r3 = make_pair(i1 * fam.x_phi, cd(-1.0) * i1 * fam.x_phi);
        VectorField lhs3 = apply_H(op, r3);
        VectorField rhs3 = make_pair(cd(-2.0) * i1 * fam.dphi_dx,
                                     cd(-2.0) * i1 * fam.dphi_dx);
        lhs3 -= rhs3;
        CHECK(dealiased_rel(lhs3, rhs3) <= 1e-8);
    }
}

TEST_CASE("apply_H basics") {
    auto g = Grid::make(30.0, 512);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);

    VectorField zero(g);
    CHECK(l2_norm(apply_H(op, zero)) == 0.0);

    // far from the soliton, H acts as sigma_z (-d2 + alpha^2) on constants
    VectorField ones(g);
    for (int j = 0; j < g->n(); ++j) ones.first[j] = 1.0;
    VectorField h1 = apply_H(op, ones);
    for (int j = 0; j < g->n(); ++j)
        if (std::abs(g->node(j)) > 15.0)
            CHECK(std::abs(h1.first[j] - 1.0) <= 1e-10);
}

TEST_CASE("matrix-free application agrees with the dense materialization") {
    auto g = Grid::make(25.0, 128);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);
    std::vector<double> m = dense_matrix(op);
    const int n = g->n();

    VectorField f(g);
    for (int j = 0; j < n; ++j) {
        const double x = g->node(j);
        f.first[j] = std::exp(-0.3 * x * x) * cd(1.0, 0.5 * x);
        f.second[j] = std::exp(-0.2 * x * x) * cd(0.2, -x);
    }
    VectorField hf = apply_H(op, f);

    // dense: real matrix times the stacked complex vector
    double err = 0;
    for (int i = 0; i < 2 * n; ++i) {
        cd acc = 0;
        for (int j = 0; j < 2 * n; ++j) {
            const cd fj = j < n ? f.first[j] : f.second[j - n];
            acc += m[static_cast<size_t>(i) * 2 * n + j] * fj;
        }
        const cd hi = i < n ? hf.first[i] : hf.second[i - n];
        err = std::max(err, std::abs(acc - hi));
    }
    CHECK(err <= 1e-10);
}

TEST_CASE("root basis: residuals, rank, parity") {
    auto g = Grid::make(40.0, 2048);
    for (double alpha : {1.0, 2.0}) {
        LinearizedOperator op = assemble_H(alpha, 3.0, g);
        auto basis = root_basis(alpha, 3.0, g);
        // residual relative to the grid-level bound on ||H||^2
        const double ximax = std::abs(g->wavenumber(g->n() / 2));
        double pot = 0;
        for (double v : op.pot_a()) pot = std::max(pot, v);
        const double rho = ximax * ximax + alpha * alpha + pot;
        for (const auto& w : basis) {
            CHECK(l2_norm(w) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(l2_norm(apply_H(op, apply_H(op, w))) / (rho * rho) <= 1e-7);
        }
        // numerical rank via the plain Gram matrix
        Eigen::MatrixXcd gram(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                gram(i, j) = inner_product(basis[i], basis[j]);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
        CHECK(svd.singularValues()(3) > 0.01);

        // vectors 0, 2 odd; 1, 3 even
        const int n = g->n();
        for (int j = 1; j < n; ++j) {
            const int jr = n - j;
            CHECK(std::abs(basis[0].first[jr] + basis[0].first[j]) <= 1e-10);
            CHECK(std::abs(basis[2].first[jr] + basis[2].first[j]) <= 1e-10);
            CHECK(std::abs(basis[1].first[jr] - basis[1].first[j]) <= 1e-10);
            CHECK(std::abs(basis[3].first[jr] - basis[3].first[j]) <= 1e-10);
        }
    }
}

TEST_CASE("discrete spectrum: eigenpair, gauge, scaling") {
    auto g = Grid::make(40.0, 1024);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);
    SpectralData sd = discrete_spectrum(op);

    CHECK(sd.lambda0 > 0.0);
    CHECK(sd.eigen_residual <= 1e-6);
    CHECK(l2_norm(sd.Z_plus) == doctest::Approx(1.0).epsilon(1e-12));
    // conjugate-pair gauge z2 = conj(z1)
    CHECK(sd.Z_plus.conjugate_pair_defect() <= 1e-12);

    // H Z- = -i lambda0 Z-
    VectorField hm = apply_H(op, sd.Z_minus);
    hm -= cd(0.0, -sd.lambda0) * sd.Z_minus;
    CHECK(l2_norm(hm) <= 1e-6);

    // grid convergence under N doubling
    auto g2 = Grid::make(40.0, 2048);
    SpectralData sd2 = discrete_spectrum(assemble_H(1.0, 3.0, g2));
    CHECK(std::abs(sd2.lambda0 - sd.lambda0) / sd.lambda0 <= 1e-6);

    // alpha-scaling power: lambda0(alpha) = alpha^2 lambda0(1)
    SpectralData sda = discrete_spectrum(assemble_H(2.0, 3.0, g2));
    const double power = std::log(sda.lambda0 / sd2.lambda0) / std::log(2.0);
    CHECK(power == doctest::Approx(2.0).epsilon(1e-3));

    // reference constant, frozen from the converged N=2048 eigensolve
    CHECK(sd2.lambda0 == doctest::Approx(2.905088379).epsilon(1e-6));
}

TEST_CASE("spectral cache returns a stable reference") {
    auto g = Grid::make(40.0, 1024);
    const SpectralData& a = spectral_data(1.0, 3.0, g);
    const SpectralData& b = spectral_data(1.0, 3.0, g);
    CHECK(&a == &b);
    CHECK(a.lambda0 > 0.0);
}

TEST_CASE("dense eigenvalue list: symmetry class and essential spectrum edge") {
    auto g = Grid::make(20.0, 256);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);
    std::vector<cd> ev = dense_eigenvalues(op);

    // symmetry: the set is closed under lambda -> -lambda (and conjugation,
    // automatic for a real matrix)
    for (const cd& l : ev) {
        double best = 1e9;
        for (const cd& m : ev) best = std::min(best, std::abs(m + l));
        CHECK(best <= 1e-6 * std::max(1.0, std::abs(l)));
    }

    // discrete imaginary pair at +-i lambda0; all real eigenvalues outside
    // (-alpha^2, alpha^2) except the numerically split 4-dim root cluster
    // around 0 (a Jordan block splits at the sqrt of the discretization error)
    SpectralData sd = discrete_spectrum(op);
    int imag_pairs = 0;
    for (const cd& l : ev) {
        if (std::abs(l.real()) < 1e-6 && l.imag() > 0.1) {
            ++imag_pairs;
            CHECK(l.imag() == doctest::Approx(sd.lambda0).epsilon(1e-6));
        }
        if (std::abs(l.imag()) < 1e-8 && std::abs(l) > 0.05)
            CHECK(std::abs(l.real()) >= 1.0 - 1e-6);
    }
    CHECK(imag_pairs == 1);
}

TEST_CASE("spectral failure on a potential-free operator") {
    auto g = Grid::make(20.0, 256);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);
    // an absurdly small search radius rejects the (real) unstable eigenvalue
    CHECK_THROWS_AS(discrete_spectrum(op, 1e-6), SpectralFailure);
}

TEST_CASE("growth rate from evolution matches the eigensolver") {
    auto g = Grid::make(30.0, 512);
    LinearizedOperator op = assemble_H(1.0, 3.0, g);
    SpectralData sd = discrete_spectrum(op);

    const double rate = growth_rate_from_evolution(op, sd, 4.0);
    CHECK(std::abs(rate - sd.lambda0) / sd.lambda0 <= 1e-2);

    const double decay =
        growth_rate_from_evolution(op, sd, 3.0, GrowthSeed::stable_mode);
    CHECK(std::abs(decay + sd.lambda0) / sd.lambda0 <= 2e-2);

    // polynomial growth: the late-window log-slope of the deflated root seed
    // decays like 1/t
    const double root_rate = growth_rate_from_evolution(
        op, sd, 12.0, GrowthSeed::root_mode, 1234, 1e-3, 6.0);
    CHECK(std::abs(root_rate) <= 0.05 * sd.lambda0);
}
