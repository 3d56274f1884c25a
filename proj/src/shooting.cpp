#include "nlslab/shooting.hpp"

#include "nlslab/linop.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nlslab {

namespace {

constexpr double kLambda0Ref = 2.905088379; // unstable rate at alpha = 1

double min_alpha(const MultiSolitonConfig& cfg) {
    double a = std::numeric_limits<double>::infinity();
    for (const auto& p : cfg.solitons) a = std::min(a, p.alpha);
    return a;
}

MultiSolitonConfig advance(const MultiSolitonConfig& cfg, double t) {
    MultiSolitonConfig out = cfg;
    for (auto& p : out.solitons) {
        p.y += p.v * t;
        p.gamma += (p.alpha * p.alpha - p.v * p.v / 4.0) * t;
    }
    return out;
}

std::vector<cd> zero_h(int m) { return std::vector<cd>(m, cd(0.0, 0.0)); }

struct ProbeOutcome {
    enum class Mode { ok, blowup, tube_exit };
    Mode mode = Mode::ok;
    std::vector<cd> b;
    double fail_time = 0.0;
    ComplexField psi_final;

    bool ok() const { return mode == Mode::ok; }
    double residual() const {
        double r = 0.0;
        for (cd c : b) r = std::max(r, std::abs(c));
        return r;
    }
};

/// Evolve the seeded data to horizon T and read off b_+(T).
ProbeOutcome run_probe(const ShotSpec& spec, const std::vector<cd>& h, double T) {
    ProbeOutcome out;
    ComplexField psi0 = seed_initial_data(spec, h);

    IntegratorConfig icfg;
    icfg.dt = spec.dt;
    icfg.t_end = T;
    icfg.k = spec.sigma0.k;
    icfg.sponge = spec.sponge;
    icfg.diag_stride = std::max(1, static_cast<int>(std::lround(1.0 / spec.dt)));

    ComplexField last = psi0;
    try {
        evolve_nls(psi0, icfg,
                   [&](double, const ComplexField& psi) { last = psi; });
    } catch (const BlowUpError& e) {
        out.mode = ProbeOutcome::Mode::blowup;
        out.fail_time = e.t;
        return out;
    }
    try {
        out.b = unstable_coefficient(last, advance(spec.sigma0, T));
    } catch (const ExtractionFailure&) {
        out.mode = ProbeOutcome::Mode::tube_exit;
        out.fail_time = T;
        return out;
    }
    out.psi_final = last;
    return out;
}

std::vector<cd> unpack(const Eigen::VectorXd& x) {
    std::vector<cd> h(x.size() / 2);
    for (size_t l = 0; l < h.size(); ++l) h[l] = cd(x(2 * l), x(2 * l + 1));
    return h;
}

Eigen::VectorXd pack_b(const std::vector<cd>& b) {
    Eigen::VectorXd f(2 * b.size());
    for (size_t l = 0; l < b.size(); ++l) {
        f(2 * l) = b[l].real();
        f(2 * l + 1) = b[l].imag();
    }
    return f;
}

struct StageResult {
    Eigen::VectorXd x;
    ProbeOutcome probe;          // at x
    Eigen::MatrixXd jacobian;    // last FD sensitivity matrix (newton path)
    bool have_jacobian = false;
};

/// Damped Newton with finite-difference Jacobian on the 2m real unknowns.
/// Failed probes (blow-up / tube exit) act as bracketing information: the
/// step is shrunk toward the last accepted point and retried.
StageResult newton_stage(const ShotSpec& spec, double T, Eigen::VectorXd x,
                         std::vector<ShotIteration>& history) {
    const int n = static_cast<int>(x.size());
    const double lam = kLambda0Ref * min_alpha(spec.sigma0) * min_alpha(spec.sigma0);
    // FD step chosen so the probe displacement at the horizon stays ~1e-4,
    // inside the tube but far above the b_+ resolution floor
    const double fd = std::max(1e-4 * std::exp(-lam * T), 1e-14);

    StageResult res;
    res.x = x;
    res.probe = run_probe(spec, unpack(x), T);
    if (!res.probe.ok())
        throw ShootingFailure("shooting: base probe failed at T = " +
                              std::to_string(T) + " (t = " +
                              std::to_string(res.probe.fail_time) + ")");
    history.push_back({T, unpack(x), res.probe.residual()});

    for (int it = 0; it < spec.max_iter; ++it) {
        if (res.probe.residual() <= spec.tol) return res;

        Eigen::VectorXd F = pack_b(res.probe.b);
        Eigen::MatrixXd J(n, n);
        for (int j = 0; j < n; ++j) {
            double step = fd;
            ProbeOutcome pj;
            for (int attempt = 0; attempt < 4; ++attempt) {
                Eigen::VectorXd xp = res.x;
                xp(j) += step;
                pj = run_probe(spec, unpack(xp), T);
                if (pj.ok()) break;
                step *= 0.25; // shrink toward the accepted point and retry
            }
            if (!pj.ok())
                throw ShootingFailure(
                    "shooting: FD probe kept failing at T = " + std::to_string(T));
            J.col(j) = (pack_b(pj.b) - F) / step;
        }
        res.jacobian = J;
        res.have_jacobian = true;

        // minimum-norm step: the sensitivity matrix is rank-deficient when a
        // symmetry pins b_+ to a line (measured codimension < 2m)
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-6);
        Eigen::VectorXd dx = svd.solve(-F);
        double scale = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 12; ++bt) {
            ProbeOutcome trial = run_probe(spec, unpack(res.x + scale * dx), T);
            if (trial.ok() && trial.residual() < res.probe.residual()) {
                res.x += scale * dx;
                res.probe = trial;
                history.push_back({T, unpack(res.x), trial.residual()});
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            if (res.probe.residual() <= 10.0 * spec.tol) return res; // at the floor
            for (const auto& hi : history)
                if (hi.T == T)
                    std::fprintf(stderr,
                                 "  stalled stage T=%g: h=(%.12e, %.12e) |b|=%.3e\n",
                                 T, hi.h[0].real(), hi.h[0].imag(), hi.residual);
            throw ShootingFailure(
                "shooting: residual stalled at " +
                std::to_string(res.probe.residual()) + " (T = " +
                std::to_string(T) + "); bracketing data in the history");
        }
    }
    if (res.probe.residual() > spec.tol)
        throw ShootingFailure("shooting: no convergence in " +
                              std::to_string(spec.max_iter) + " iterations at T = " +
                              std::to_string(T));
    return res;
}

/// Per-soliton complex secant with outer sweeps for the cross coupling.
StageResult secant_stage(const ShotSpec& spec, double T, Eigen::VectorXd x,
                         std::vector<ShotIteration>& history) {
    const int m = static_cast<int>(x.size()) / 2;
    const double lam = kLambda0Ref * min_alpha(spec.sigma0) * min_alpha(spec.sigma0);
    const double fd = std::max(1e-4 * std::exp(-lam * T), 1e-14);

    StageResult res;
    res.x = x;
    res.probe = run_probe(spec, unpack(x), T);
    if (!res.probe.ok())
        throw ShootingFailure("shooting: base probe failed at T = " +
                              std::to_string(T));
    history.push_back({T, unpack(x), res.probe.residual()});

    for (int sweep = 0; sweep < spec.max_iter; ++sweep) {
        if (res.probe.residual() <= spec.tol) return res;
        const double before = res.probe.residual();
        for (int l = 0; l < m; ++l) {
            std::vector<cd> h = unpack(res.x);
            cd h_prev = h[l] + cd(fd, 0.0);
            std::vector<cd> hp = h;
            hp[l] = h_prev;
            ProbeOutcome pp = run_probe(spec, hp, T);
            if (!pp.ok()) continue;
            cd b_prev = pp.b[l], b_cur = res.probe.b[l];
            if (std::abs(b_cur - b_prev) == 0.0) continue;
            cd step = -b_cur * (h[l] - h_prev) / (b_cur - b_prev);
            for (int bt = 0; bt < 10; ++bt) {
                std::vector<cd> ht = h;
                ht[l] = h[l] + step;
                ProbeOutcome trial = run_probe(spec, ht, T);
                if (trial.ok() && trial.residual() < res.probe.residual()) {
                    res.x(2 * l) = ht[l].real();
                    res.x(2 * l + 1) = ht[l].imag();
                    res.probe = trial;
                    history.push_back({T, ht, trial.residual()});
                    break;
                }
                step *= 0.5;
            }
        }
        if (res.probe.residual() >= before) {
            if (res.probe.residual() <= 10.0 * spec.tol) return res;
            throw ShootingFailure("shooting: secant sweeps stalled at T = " +
                                  std::to_string(T));
        }
    }
    if (res.probe.residual() > spec.tol)
        throw ShootingFailure("shooting: secant did not converge at T = " +
                              std::to_string(T));
    return res;
}

StageResult solve_stage(const ShotSpec& spec, double T, const Eigen::VectorXd& x,
                        std::vector<ShotIteration>& history) {
    return spec.solver == ShotSolver::newton_fd
               ? newton_stage(spec, T, x, history)
               : secant_stage(spec, T, x, history);
}

} // namespace

double sigma_space_norm(const ComplexField& r) {
    const Grid& g = *r.grid();
    ComplexField d1 = spectral_derivative(r, 1);
    ComplexField d2 = spectral_derivative(r, 2);
    const double h2 = std::sqrt(l2_norm(r) * l2_norm(r) + l2_norm(d1) * l2_norm(d1) +
                                l2_norm(d2) * l2_norm(d2));
    // weighted_norm applies <x>^{-exponent}; exponent = -1 gives <x> r
    const double xl2 = weighted_norm(r, 0.0, -1.0);
    ComplexField xr(r.grid());
    for (int j = 0; j < g.n(); ++j)
        xr[j] = std::sqrt(1.0 + g.node(j) * g.node(j)) * r[j];
    const double w11 = l1_norm(xr) + l1_norm(spectral_derivative(xr, 1));
    return h2 + xl2 + w11;
}

ComplexField remove_unstable_overlap(const ComplexField& r,
                                     const MultiSolitonConfig& cfg,
                                     const GridPtr& grid) {
    cfg.validate();
    const int m = cfg.m();
    DiscreteFrame frame = build_frame(cfg, 0.0, grid);

    std::vector<ComplexField> z;
    for (int l = 0; l < m; ++l) {
        const SpectralData& sd = spectral_data(cfg.solitons[l].alpha, cfg.k, grid);
        z.push_back(galilean_lift(sd.Z_plus, cfg.solitons[l], 0.0).first);
    }
    auto unstable_coeffs = [&](const ComplexField& f) {
        Decomposition dec = decompose(as_pair(f), frame);
        Eigen::VectorXd b(2 * m);
        for (int l = 0; l < m; ++l) {
            const cd c = dec.coefficients[l * DiscreteFrame::kPerSoliton];
            b(2 * l) = c.real();
            b(2 * l + 1) = c.imag();
        }
        return b;
    };

    // b(as_pair(.)) is real-linear, so 2m column probes give the exact map
    Eigen::MatrixXd A(2 * m, 2 * m);
    for (int l = 0; l < m; ++l) {
        A.col(2 * l) = unstable_coeffs(z[l]);
        A.col(2 * l + 1) = unstable_coeffs(cd(0.0, 1.0) * z[l]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
    svd.setThreshold(1e-6); // minimum-norm when a symmetry makes b real
    ComplexField out = r;
    for (int sweep = 0; sweep < 2; ++sweep) { // one refinement pass
        Eigen::VectorXd c = svd.solve(unstable_coeffs(out));
        for (int l = 0; l < m; ++l) {
            const cd cl(c(2 * l), c(2 * l + 1));
            for (int j = 0; j < grid->n(); ++j) out[j] -= cl * z[l][j];
        }
    }
    return out;
}

ComplexField seed_initial_data(const ShotSpec& spec, const std::vector<cd>& h) {
    spec.sigma0.validate();
    if (!spec.grid) throw std::invalid_argument("seed_initial_data: no grid");
    const int m = spec.sigma0.m();
    if (!h.empty() && static_cast<int>(h.size()) != m)
        throw std::invalid_argument("seed_initial_data: h size != m");
    const GridPtr& g = spec.grid;
    const int n = g->n();

    ComplexField Q = multi_soliton(spec.sigma0, 0.0, g);

    // scalar perturbation: r0 plus the unstable directions scaled by h
    ComplexField p(g);
    if (spec.r0.grid()) {
        if (!same_grid(spec.r0.grid(), g))
            throw std::invalid_argument("seed_initial_data: r0 grid mismatch");
        p += spec.r0;
        if (l2_norm(spec.r0) > 0.1)
            std::fprintf(stderr,
                         "seed_initial_data: ||r0|| = %g is large; the "
                         "center-stable expansion may not apply\n",
                         l2_norm(spec.r0));
    }
    for (int l = 0; l < m; ++l) {
        if (l < static_cast<int>(h.size()) && h[l] != cd(0.0, 0.0)) {
            const SpectralData& sd =
                spectral_data(spec.sigma0.solitons[l].alpha, spec.sigma0.k, g);
            VectorField zp = galilean_lift(sd.Z_plus, spec.sigma0.solitons[l], 0.0);
            for (int j = 0; j < n; ++j) p[j] += h[l] * zp.first[j];
        }
    }

    ComplexField psi = Q + p;
    std::vector<double> F0 = orthogonality_residuals(psi, spec.sigma0);
    double worst = 0.0;
    for (double f : F0) worst = std::max(worst, std::abs(f));
    if (worst <= 1e-14 * std::max(1.0, l2_norm(Q))) return psi; // E = 0 exactly

    // root-span correction E: the constraints are linear in E, so one pass
    // of column probes assembles the exact 4m x 4m system
    std::vector<ComplexField> dirs;
    for (int l = 0; l < m; ++l) {
        const SpectralData& sd =
            spectral_data(spec.sigma0.solitons[l].alpha, spec.sigma0.k, g);
        for (int w = 0; w < 4; ++w)
            dirs.push_back(
                galilean_lift(sd.root[w], spec.sigma0.solitons[l], 0.0).first);
    }
    const int nc = 4 * m;
    Eigen::MatrixXd A(nc, nc);
    Eigen::VectorXd rhs(nc);
    for (int i = 0; i < nc; ++i) rhs(i) = -F0[i];
    for (int jcol = 0; jcol < nc; ++jcol) {
        ComplexField probe = psi;
        probe += dirs[jcol];
        std::vector<double> Fj = orthogonality_residuals(probe, spec.sigma0);
        for (int i = 0; i < nc; ++i) A(i, jcol) = Fj[i] - F0[i];
    }
    Eigen::VectorXd c = A.partialPivLu().solve(rhs);
    for (int jcol = 0; jcol < nc; ++jcol)
        for (int j = 0; j < n; ++j) psi[j] += c(jcol) * dirs[jcol][j];
    return psi;
}

std::vector<cd> unstable_coefficient(const ComplexField& psi,
                                     const MultiSolitonConfig& sigma_guess,
                                     const ExtractOptions& opt) {
    ModulationState st = extract_parameters(psi, sigma_guess, opt);
    DiscreteFrame frame = build_frame(st.sigma, 0.0, psi.grid());
    Decomposition dec = decompose(as_pair(st.radiation), frame);
    std::vector<cd> b(st.sigma.m());
    for (int l = 0; l < st.sigma.m(); ++l)
        b[l] = dec.coefficients[l * DiscreteFrame::kPerSoliton];
    return b;
}

ShotResult shoot(const ShotSpec& spec) {
    spec.sigma0.validate();
    const int m = spec.sigma0.m();
    if (!(spec.T > 0.0) || !(spec.dt > 0.0) || !(spec.tol > 0.0))
        throw std::invalid_argument("shoot: need T, dt, tol > 0");

    std::vector<double> stages;
    for (double T = std::min(spec.stage_T0, spec.T); T < spec.T - 1e-9;
         T += spec.stage_step)
        stages.push_back(T);
    stages.push_back(spec.T);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
    if (!spec.h0.empty()) {
        if (static_cast<int>(spec.h0.size()) != m)
            throw std::invalid_argument("shoot: h0 size != m");
        for (int l = 0; l < m; ++l) {
            x(2 * l) = spec.h0[l].real();
            x(2 * l + 1) = spec.h0[l].imag();
        }
    }

    ShotResult result;
    StageResult st;
    for (double T : stages) {
        st = solve_stage(spec, T, x, result.history);
        x = st.x;
    }
    result.h_star = unpack(x);
    result.b_terminal = st.probe.b;

    if (!st.have_jacobian) { // secant path: one-off sensitivity matrix
        const double lam =
            kLambda0Ref * min_alpha(spec.sigma0) * min_alpha(spec.sigma0);
        const double fd = std::max(1e-4 * std::exp(-lam * spec.T), 1e-14);
        Eigen::VectorXd F = pack_b(st.probe.b);
        Eigen::MatrixXd J(2 * m, 2 * m);
        for (int j = 0; j < 2 * m; ++j) {
            Eigen::VectorXd xp = x;
            xp(j) += fd;
            ProbeOutcome pj = run_probe(spec, unpack(xp), spec.T);
            if (!pj.ok())
                throw ShootingFailure("shoot: sensitivity probe failed");
            J.col(j) = (pack_b(pj.b) - F) / fd;
        }
        st.jacobian = J;
        st.have_jacobian = true;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(st.jacobian, Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    result.sensitivity_rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-3 * smax) ++result.sensitivity_rank;
    const Eigen::VectorXd v1 = svd.matrixV().col(0);
    for (int l = 0; l < m; ++l)
        result.sensitive_direction.push_back(cd(v1(2 * l), v1(2 * l + 1)));

    result.psi0 = seed_initial_data(spec, result.h_star);
    ComplexField Q = multi_soliton(spec.sigma0, 0.0, spec.grid);
    result.g_estimate = result.psi0 - Q;
    if (spec.r0.grid()) result.g_estimate -= spec.r0;

    // T-ladder: refine at T+1, T+2 and record the successive h changes
    Eigen::VectorXd xl = x;
    std::vector<Eigen::VectorXd> ladder = {x};
    for (int j = 1; j <= spec.ladder_steps; ++j) {
        StageResult ls = solve_stage(spec, spec.T + j, xl, result.history);
        xl = ls.x;
        ladder.push_back(xl);
    }
    for (size_t j = 1; j < ladder.size(); ++j)
        result.ladder_h_diff.push_back((ladder[j] - ladder[j - 1]).norm());
    return result;
}

DichotomyReport classify_dichotomy(const ShotSpec& spec,
                                   const std::vector<cd>& h_star, double offset,
                                   const std::vector<cd>& direction,
                                   double t_max) {
    DichotomyReport rep;
    const double peak = linf_norm(multi_soliton(spec.sigma0, 0.0, spec.grid));
    std::vector<cd> dir = direction;
    if (dir.empty()) {
        dir.assign(h_star.size(), cd(0.0, 0.0));
        dir[0] = cd(1.0, 0.0);
    }

    auto classify = [&](double sign, SideBehavior& side, double& t_out) {
        std::vector<cd> h = h_star;
        for (size_t l = 0; l < h.size(); ++l) h[l] += sign * offset * dir[l];
        ComplexField psi0 = seed_initial_data(spec, h);
        IntegratorConfig icfg;
        icfg.dt = spec.dt;
        icfg.t_end = t_max;
        icfg.k = spec.sigma0.k;
        icfg.sponge = spec.sponge;
        icfg.diag_stride = std::max(1, static_cast<int>(std::lround(0.5 / spec.dt)));
        ComplexField last = psi0;
        double t_focus = -1.0;
        try {
            evolve_nls(psi0, icfg, [&](double t, const ComplexField& psi) {
                last = psi;
                // once the peak doubles the focusing is irreversible; the
                // grid cannot resolve the subsequent collapse, so don't wait
                // for the overflow guard
                if (t_focus < 0.0 && linf_norm(psi) > 2.0 * peak) t_focus = t;
            });
        } catch (const BlowUpError& e) {
            side = SideBehavior::blowup;
            t_out = e.t;
            return;
        }
        if (t_focus >= 0.0) {
            side = SideBehavior::blowup;
            t_out = t_focus;
            return;
        }
        t_out = t_max;
        side = linf_norm(last) < 0.5 * peak ? SideBehavior::dispersal
                                            : SideBehavior::undecided;
    };
    classify(+1.0, rep.plus, rep.t_plus);
    classify(-1.0, rep.minus, rep.t_minus);
    return rep;
}

ManifoldScan manifold_scan(const ShotSpec& base, const std::vector<double>& scales) {
    if (!base.r0.grid())
        throw std::invalid_argument("manifold_scan: base.r0 required");
    ManifoldScan scan;
    const int m = base.sigma0.m();

    // s = 0 baseline first: the shot compensating the discretization's own
    // unstable leakage, which every h*(s) inherits as an offset
    ShotSpec spec0 = base;
    spec0.r0 = cd(0.0, 0.0) * base.r0;
    spec0.ladder_steps = 0;
    std::vector<cd> baseline = shoot(spec0).h_star;

    std::vector<cd> warm = baseline;
    double prev_s = 0.0;
    for (double s : scales) {
        ManifoldPoint pt;
        pt.s = s;
        if (s == 0.0) {
            pt.h_star = baseline;
        } else {
            ShotSpec spec = base;
            spec.r0 = cd(s, 0.0) * base.r0;
            spec.ladder_steps = 0;
            // quadratic manifold: scale the previous baseline-relative part
            spec.h0 = baseline;
            if (prev_s > 0.0) {
                const double q = (s / prev_s) * (s / prev_s);
                for (int l = 0; l < m; ++l)
                    spec.h0[l] += q * (warm[l] - baseline[l]);
            }
            ShotResult r = shoot(spec);
            pt.h_star = r.h_star;
            warm = r.h_star;
            prev_s = s;
        }
        for (int l = 0; l < m; ++l)
            pt.h_norm = std::max(pt.h_norm, std::abs(pt.h_star[l] - baseline[l]));
        scan.points.push_back(pt);
    }
    // Lipschitz quotients and log-log fit of the baseline-relative norms
    std::vector<double> lx, ly;
    for (size_t i = 0; i < scan.points.size(); ++i) {
        if (i > 0) {
            const double ds = std::abs(scan.points[i].s - scan.points[i - 1].s);
            if (ds > 0.0)
                scan.max_lipschitz =
                    std::max(scan.max_lipschitz,
                             std::abs(scan.points[i].h_norm -
                                      scan.points[i - 1].h_norm) /
                                 ds);
        }
        if (scan.points[i].s > 0.0 && scan.points[i].h_norm > 0.0) {
            lx.push_back(std::log(scan.points[i].s));
            ly.push_back(std::log(scan.points[i].h_norm));
        }
    }
    if (lx.size() >= 2) {
        const size_t n = lx.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        scan.fit_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return scan;
}

} // namespace nlslab
