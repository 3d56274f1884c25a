#include "nlslab/linop.hpp"

#include "nlslab/evolve.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace nlslab {

namespace {

// Dense spectral second-derivative matrix: circulant with first column
// ifft(-xi^2) (the DFT of a delta is identically 1).
Eigen::MatrixXd second_derivative_matrix(const Grid& g) {
    const int n = g.n();
    std::vector<cd> col(n);
    for (int j = 0; j < n; ++j) {
        const double xi = g.wavenumber(j);
        col[j] = -xi * xi;
    }
    g.ifft(col.data());
    Eigen::MatrixXd d2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2(i, j) = col[(i - j + n) % n].real();
    return d2;
}

struct ScalarPair {
    Eigen::MatrixXd lp; // -d2 + a^2 - (2k+1) phi^{2k}
    Eigen::MatrixXd lm; // -d2 + a^2 - phi^{2k}
};

ScalarPair scalar_operators(double alpha, double k, const GridPtr& grid) {
    const int n = grid->n();
    Eigen::MatrixXd d2 = second_derivative_matrix(*grid);
    ScalarPair out{-d2, -d2};
    for (int j = 0; j < n; ++j) {
        const double phi = ground_state_value(alpha, k, grid->node(j));
        const double p2k = std::pow(phi, 2.0 * k);
        out.lp(j, j) += alpha * alpha - (2.0 * k + 1.0) * p2k;
        out.lm(j, j) += alpha * alpha - p2k;
    }
    return out;
}

double fit_slope(const std::vector<double>& t, const std::vector<double>& v) {
    const size_t n = t.size();
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (size_t i = 0; i < n; ++i) {
        st += t[i];
        sv += v[i];
        stt += t[i] * t[i];
        stv += t[i] * v[i];
    }
    const double denom = n * stt - st * st;
    return (n * stv - st * sv) / denom;
}

} // namespace

LinearizedOperator::LinearizedOperator(double alpha, double k, GridPtr grid)
    : alpha_(alpha), k_(k), grid_(std::move(grid)) {
    if (!(alpha > 0.0) || !(k > 0.0))
        throw std::invalid_argument("LinearizedOperator: alpha, k must be positive");
    const double edge = ground_state_value(alpha, k, grid_->half_length());
    if (edge > 1e-8)
        throw std::invalid_argument(
            "LinearizedOperator: box too small, phi at the edge = " +
            std::to_string(edge));
    pot_a_.resize(grid_->n());
    pot_b_.resize(grid_->n());
    for (int j = 0; j < grid_->n(); ++j) {
        const double phi = ground_state_value(alpha, k, grid_->node(j));
        const double p2k = std::pow(phi, 2.0 * k);
        pot_a_[j] = (k + 1.0) * p2k;
        pot_b_[j] = k * p2k;
    }
}

LinearizedOperator assemble_H(double alpha, double k, const GridPtr& grid) {
    return LinearizedOperator(alpha, k, grid);
}

VectorField apply_H(const LinearizedOperator& op, const VectorField& f) {
    if (!same_grid(op.grid(), f.grid()))
        throw std::invalid_argument("apply_H: grid mismatch");
    const double a2 = op.alpha() * op.alpha();
    ComplexField d2f1 = spectral_derivative(f.first, 2);
    ComplexField d2f2 = spectral_derivative(f.second, 2);
    VectorField out(op.grid());
    for (int j = 0; j < op.grid()->n(); ++j) {
        const double va = op.pot_a()[j];
        const double vb = op.pot_b()[j];
        out.first[j] = -d2f1[j] + (a2 - va) * f.first[j] - vb * f.second[j];
        out.second[j] = d2f2[j] - (a2 - va) * f.second[j] + vb * f.first[j];
    }
    return out;
}

std::array<VectorField, 4> root_basis(double alpha, double k, const GridPtr& grid) {
    GroundStateFamily fam = ground_state_family(alpha, k, grid);
    const cd i1(0.0, 1.0);
    std::array<VectorField, 4> out{
        VectorField(fam.dphi_dx, fam.dphi_dx),
        VectorField(i1 * fam.phi, cd(-1.0) * (i1 * fam.phi)),
        VectorField(i1 * fam.x_phi, cd(-1.0) * (i1 * fam.x_phi)),
        VectorField(fam.dphi_dalpha, fam.dphi_dalpha)};
    for (auto& v : out) v *= 1.0 / l2_norm(v);
    return out;
}

std::vector<double> dense_matrix(const LinearizedOperator& op) {
    const int n = op.grid()->n();
    if (2 * n > 8192)
        throw std::invalid_argument("dense_matrix: 2N > 8192 is not feasible");
    const double a2 = op.alpha() * op.alpha();
    Eigen::MatrixXd d2 = second_derivative_matrix(*op.grid());
    // row-major 2N x 2N block matrix [[A, -B], [B, -A]]
    const int nn = 2 * n;
    std::vector<double> m(static_cast<size_t>(nn) * nn, 0.0);
    auto at = [&](int i, int j) -> double& {
        return m[static_cast<size_t>(i) * nn + j];
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            at(i, j) = -d2(i, j);
            at(n + i, n + j) = d2(i, j);
        }
        at(i, i) += a2 - op.pot_a()[i];
        at(n + i, n + i) -= a2 - op.pot_a()[i];
        at(i, n + i) = -op.pot_b()[i];
        at(n + i, i) = op.pot_b()[i];
    }
    return m;
}

std::vector<cd> dense_eigenvalues(const LinearizedOperator& op) {
    const int n = op.grid()->n();
    const int nn = 2 * n;
    std::vector<double> m = dense_matrix(op);
    std::vector<double> wr(nn), wi(nn);
    const int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', nn, m.data(), nn,
                                   wr.data(), wi.data(), nullptr, nn, nullptr, nn);
    if (info != 0)
        throw SpectralFailure("dense_eigenvalues: dgeev failed, info = " +
                              std::to_string(info));
    std::vector<cd> out(nn);
    for (int j = 0; j < nn; ++j) out[j] = cd(wr[j], wi[j]);
    return out;
}

SpectralData discrete_spectrum(const LinearizedOperator& op, double search_radius) {
    const GridPtr& grid = op.grid();
    const double alpha = op.alpha();
    const double k = op.k();

    // coarse dense eigensolve of Lm*Lp for a shift near -lambda0^2; the box
    // shrinks with alpha so the sech core stays resolved at 256 points
    // (under-resolution bends the negative eigenvalue into a complex pair)
    const double lc = std::min(grid->half_length(), 24.0 / alpha);
    GridPtr coarse = grid->n() > 256 || lc < grid->half_length()
                         ? Grid::make(lc, 256)
                         : grid;
    ScalarPair sc = scalar_operators(alpha, k, coarse);
    Eigen::MatrixXd mc = sc.lm * sc.lp;
    Eigen::EigenSolver<Eigen::MatrixXd> es(mc, /*computeEigenvectors=*/false);
    double mu = 0.0;
    bool found = false;
    std::vector<double> nearest;
    for (int j = 0; j < mc.rows(); ++j) {
        const cd ev = es.eigenvalues()(j);
        if (std::abs(ev.imag()) > 1e-8 * std::max(1.0, std::abs(ev))) continue;
        if (ev.real() < -1e-8 && (!found || ev.real() < mu)) {
            mu = ev.real();
            found = true;
        }
        if (std::abs(ev.real()) < 1.0) nearest.push_back(ev.real());
    }
    if (!found) {
        std::sort(nearest.begin(), nearest.end(),
                  [](double a, double b) { return std::abs(a) < std::abs(b); });
        std::ostringstream msg;
        msg << "discrete_spectrum: no negative eigenvalue of Lm*Lp; nearest:";
        for (size_t j = 0; j < std::min<size_t>(4, nearest.size()); ++j)
            msg << ' ' << nearest[j];
        throw SpectralFailure(msg.str());
    }

    // fine-grid inverse iteration on (Lm*Lp - mu I)
    const int n = grid->n();
    ScalarPair sf = coarse == grid ? std::move(sc) : scalar_operators(alpha, k, grid);
    Eigen::MatrixXd mf = sf.lm * sf.lp;
    Eigen::VectorXd x(n);
    {
        std::mt19937_64 rng(20240817u);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int j = 0; j < n; ++j)
            x(j) = ground_state_value(alpha, k, grid->node(j)) + 1e-2 * nd(rng);
    }
    x.normalize();
    double lambda = mu;
    double residual = 1.0;
    for (int refine = 0; refine < 3 && residual > 1e-12 * std::abs(lambda); ++refine) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(
            mf - lambda * Eigen::MatrixXd::Identity(n, n));
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd y = lu.solve(x);
            x = y.normalized();
            const Eigen::VectorXd mx = mf * x;
            lambda = x.dot(mx);
            residual = (mx - lambda * x).norm();
            if (residual <= 1e-12 * std::max(1.0, std::abs(lambda))) break;
        }
    }
    if (!(lambda < 0.0))
        throw SpectralFailure("discrete_spectrum: inverse iteration landed at " +
                              std::to_string(lambda));
    const double lambda0 = std::sqrt(-lambda);
    if (search_radius > 0.0 && lambda0 > search_radius)
        throw SpectralFailure("discrete_spectrum: lambda0 = " +
                              std::to_string(lambda0) + " outside search radius");

    // eigenvector gauge: u real, w = -i Lp u / lambda0 purely imaginary,
    // Z+ = ((u + w)/2, (u - w)/2) so the pair is component-wise conjugate.
    ComplexField u(grid);
    double sign_check = 0.0;
    for (int j = 0; j < n; ++j) {
        u[j] = x(j);
        sign_check += x(j) * ground_state_value(alpha, k, grid->node(j));
    }
    if (sign_check < 0.0) u *= -1.0;
    ComplexField lp_u = cd(-1.0) * spectral_derivative(u, 2);
    for (int j = 0; j < n; ++j) {
        const double phi = ground_state_value(alpha, k, grid->node(j));
        lp_u[j] += (alpha * alpha - (2.0 * k + 1.0) * std::pow(phi, 2.0 * k)) * u[j];
    }
    ComplexField z1(grid), z2(grid);
    for (int j = 0; j < n; ++j) {
        const double wi = -lp_u[j].real() / lambda0; // w = i * wi
        z1[j] = 0.5 * cd(u[j].real(), wi);
        z2[j] = std::conj(z1[j]);
    }
    VectorField zp(std::move(z1), std::move(z2));
    zp *= 1.0 / l2_norm(zp);

    SpectralData out;
    out.alpha = alpha;
    out.k = k;
    out.lambda0 = lambda0;
    out.Z_minus = VectorField(conj(zp.first), conj(zp.second));
    out.Z_plus = std::move(zp);
    out.root = root_basis(alpha, k, grid);
    VectorField hz = apply_H(op, out.Z_plus);
    hz -= cd(0.0, lambda0) * out.Z_plus;
    out.eigen_residual = l2_norm(hz);
    for (int j = 0; j < 4; ++j)
        out.root_residuals[j] = l2_norm(apply_H(op, apply_H(op, out.root[j])));
    return out;
}

const SpectralData& spectral_data(double alpha, double k, const GridPtr& grid) {
    struct Key {
        const Grid* g;
        double alpha;
        double k;
        bool operator<(const Key& o) const {
            return std::tie(g, alpha, k) < std::tie(o.g, o.alpha, o.k);
        }
    };
    struct Entry {
        GridPtr keep_alive;
        SpectralData data;
    };
    static std::map<Key, Entry> cache;
    static std::mutex mtx;
    const Key key{grid.get(), alpha, k};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second.data;
    }
    SpectralData sd = discrete_spectrum(assemble_H(alpha, k, grid));
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, ignored] = cache.emplace(key, Entry{grid, std::move(sd)});
    return it->second.data;
}

double growth_rate_from_evolution(const LinearizedOperator& op,
                                  const SpectralData& sd, double t_max,
                                  GrowthSeed seed_kind, unsigned rng_seed,
                                  double dt, double fit_start) {
    const GridPtr& grid = op.grid();
    MultiSolitonConfig cfg;
    cfg.k = op.k();
    cfg.solitons = {SolitonParams{0.0, 0.0, op.alpha(), 0.0}};

    VectorField u(grid);
    switch (seed_kind) {
        case GrowthSeed::random_localized: {
            std::mt19937_64 rng(rng_seed);
            std::normal_distribution<double> nd(0.0, 1.0);
            for (int j = 0; j < grid->n(); ++j) {
                const double env = std::exp(-0.25 * grid->node(j) * grid->node(j));
                u.first[j] = env * cd(nd(rng), nd(rng));
                u.second[j] = env * cd(nd(rng), nd(rng));
            }
            break;
        }
        case GrowthSeed::stable_mode:
            u = sd.Z_minus;
            break;
        case GrowthSeed::root_mode:
            u = sd.root[3]; // d_alpha direction, in ker H^2 \ ker H
            break;
    }
    u *= 1.0 / l2_norm(u);

    const cd pairing = symplectic_product(sd.Z_plus, sd.Z_minus);
    const cd pairing_m = symplectic_product(sd.Z_minus, sd.Z_plus);
    const double a2 = op.alpha() * op.alpha();
    auto observable = [&](double t, const VectorField& v) -> double {
        if (seed_kind == GrowthSeed::root_mode) return l2_norm(v);
        // remove the alpha^2 t gauge so coefficients sit in the static frame
        VectorField w = v;
        for (int j = 0; j < grid->n(); ++j) {
            const cd ph = std::polar(1.0, -a2 * t);
            w.first[j] *= ph;
            w.second[j] *= std::conj(ph);
        }
        if (seed_kind == GrowthSeed::stable_mode)
            return std::abs(symplectic_product(w, sd.Z_plus) / pairing_m);
        return std::abs(symplectic_product(w, sd.Z_minus) / pairing);
    };

    // keep the root seed clean: repeatedly remove the unstable coefficient,
    // which would otherwise take over from the e^{lambda0 t} discretization
    // leak long before the polynomial growth window closes (for m = 1 the
    // lifted eigenmode solves the system exactly, so this deflation commutes
    // with the flow)
    auto deflate = [&](double t, VectorField& v) {
        const cd ph = std::polar(1.0, -a2 * t);
        VectorField w = v;
        for (int j = 0; j < grid->n(); ++j) {
            w.first[j] *= ph;
            w.second[j] *= std::conj(ph);
        }
        const cd bp = symplectic_product(w, sd.Z_minus) / pairing;
        w = sd.Z_plus;
        for (int j = 0; j < grid->n(); ++j) {
            v.first[j] -= bp * std::conj(ph) * w.first[j];
            v.second[j] -= bp * ph * w.second[j];
        }
    };

    std::vector<double> ts, logs;
    const int n_steps = static_cast<int>(std::llround(t_max / dt));
    const int stride = std::max(1, n_steps / 200);
    double t = 0.0;
    if (fit_start <= 0.0) {
        ts.push_back(0.0);
        logs.push_back(std::log(observable(0.0, u)));
    }
    for (int s = 0; s < n_steps; ++s) {
        u = step_charge_transfer(u, t, dt, cfg);
        t = (s + 1) * dt;
        if ((s + 1) % stride == 0) {
            if (seed_kind == GrowthSeed::root_mode) deflate(t, u);
            if (t >= fit_start) {
                const double val = observable(t, u);
                if (val > 0.0 && std::isfinite(val)) {
                    ts.push_back(t);
                    logs.push_back(std::log(val));
                }
            }
        }
    }
    if (ts.size() < 10)
        throw NumericalError("growth_rate_from_evolution: fit window too short");
    return fit_slope(ts, logs);
}

} // namespace nlslab
