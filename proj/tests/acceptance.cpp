// Acceptance gate: ten go/no-go checks, one line each. Tolerances are pinned
// here, not configurable. Exit status is the number of failed criteria.
// Optionally pass criterion numbers to run a subset (e.g. "acceptance 8 9").
#include "nlslab/diagnostics.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/projections.hpp"
#include "nlslab/shooting.hpp"
#include "nlslab/solitons.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace nlslab;

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    template <typename T>
    Check& operator<<(const T& v) {
        detail << v;
        return *this;
    }
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [FAILED: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// de-aliased relative residual (the raw residual at alpha = 2 is dominated by
// the sampled tail of phi folding back under the spectral d2)
double dealiased_rel(VectorField diff, const VectorField& rhs) {
    diff.first = low_pass(diff.first, 0.5);
    diff.second = low_pass(diff.second, 0.5);
    return l2_norm(diff) / l2_norm(rhs);
}

VectorField random_pair(const GridPtr& g, unsigned seed, double center,
                        double width = 4.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    VectorField u(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j) - center;
        const double env = std::exp(-x * x / (2.0 * width * width));
        u.first[j] = env * cd(dist(rng), dist(rng));
    }
    u.second = conj(u.first);
    return u;
}

struct AffineFit {
    double a = 0.0, b = 0.0;
};

AffineFit fit_affine(const std::vector<double>& t, const std::vector<double>& v) {
    const double n = static_cast<double>(t.size());
    double st = 0, sv = 0, stt = 0, stv = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sv += v[i];
        stt += t[i] * t[i];
        stv += t[i] * v[i];
    }
    AffineFit f;
    f.b = (n * stv - st * sv) / (n * stt - st * st);
    f.a = (sv - f.b * st) / n;
    return f;
}

// shared between criteria 8 and 9
std::optional<ShotSpec> g_shot_spec;
std::optional<ShotResult> g_shot_result;

// ---------------------------------------------------------------------------

void criterion_1(Check& c) { // spectral identities, k=3, alpha in {1,2}
    const auto t0 = std::chrono::steady_clock::now();
    auto g = Grid::make(40.0, 2048);
    const double k = 3.0;
    double worst = 0.0;
    for (double alpha : {1.0, 2.0}) {
        LinearizedOperator op = assemble_H(alpha, k, g);
        GroundStateFamily fam = ground_state_family(alpha, k, g);
        const cd i1(0.0, 1.0);

        auto rel = [&](const VectorField& v, const VectorField& rhs) {
            VectorField d = apply_H(op, v);
            if (l2_norm(rhs) > 0.0) d -= rhs;
            worst = std::max(worst,
                             dealiased_rel(d, l2_norm(rhs) > 0.0 ? rhs : v));
        };
        // kernel
        rel(VectorField(fam.dphi_dx, fam.dphi_dx), VectorField(g));
        rel(VectorField(i1 * fam.phi, -i1 * fam.phi), VectorField(g));
        // generalized kernel: H(scaling) = -2 alpha (phi, -phi),
        // H(Galilean) = -2 (phi', phi') in both real and imaginary gauge
        rel(VectorField(fam.dphi_dalpha, fam.dphi_dalpha),
            VectorField(cd(-2.0 * alpha) * fam.phi, cd(2.0 * alpha) * fam.phi));
        rel(VectorField(fam.x_phi, cd(-1.0) * fam.x_phi),
            VectorField(cd(-2.0) * fam.dphi_dx, cd(-2.0) * fam.dphi_dx));
        rel(VectorField(i1 * fam.x_phi, -i1 * fam.x_phi),
            VectorField(cd(-2.0) * i1 * fam.dphi_dx,
                        cd(-2.0) * i1 * fam.dphi_dx));

        // the four H^2-kernel residuals, relative to the operator bound
        const double ximax = std::abs(g->wavenumber(g->n() / 2));
        double pot = 0.0;
        for (double v : op.pot_a()) pot = std::max(pot, v);
        const double rho = ximax * ximax + alpha * alpha + pot;
        for (const VectorField& w : root_basis(alpha, k, g))
            worst = std::max(
                worst, l2_norm(apply_H(op, apply_H(op, w))) / (rho * rho));
    }
    const double elapsed = seconds_since(t0);
    c << "worst relative residual " << worst << ", " << elapsed << " s";
    c.require(worst <= 1e-7, "residual > 1e-7");
    c.require(elapsed <= 60.0, "over 60 s budget");
}

void criterion_2(Check& c) { // lambda0 dual provenance + convergence + scaling
    auto g1 = Grid::make(40.0, 1024);
    auto g2 = Grid::make(40.0, 2048);
    LinearizedOperator op1 = assemble_H(1.0, 3.0, g1);
    SpectralData sd1 = discrete_spectrum(op1);
    const double rate = growth_rate_from_evolution(op1, sd1, 4.0);
    const double dual = std::abs(rate - sd1.lambda0) / sd1.lambda0;

    SpectralData sd2 = discrete_spectrum(assemble_H(1.0, 3.0, g2));
    const double conv = std::abs(sd2.lambda0 - sd1.lambda0) / sd1.lambda0;

    SpectralData sda = discrete_spectrum(assemble_H(2.0, 3.0, g2));
    const double power = std::log(sda.lambda0 / sd2.lambda0) / std::log(2.0);

    c << "lambda0 " << sd2.lambda0 << ", eigensolver vs growth fit "
      << dual << ", N-doubling change " << conv << ", alpha power " << power;
    c.require(dual <= 1e-2, "provenance disagreement > 1e-2");
    c.require(conv <= 1e-6, "not grid-converged to 1e-6");
    c.require(std::abs(power - 2.0) <= 1e-3, "alpha power not 2");
}

void criterion_3(Check& c) { // integrator order + conservation
    auto g = Grid::make(30.0, 512);
    const double k = 3.0;
    SolitonParams p{1.0, 0.0, 1.0, 0.3};
    auto err_at = [&](double dt) {
        ComplexField psi = solitary_wave(p, k, 0.0, g);
        const int n = static_cast<int>(std::llround(0.5 / dt));
        for (int s = 0; s < n; ++s) psi = step_nls(psi, dt, k);
        psi -= solitary_wave(p, k, 0.5, g);
        return l2_norm(psi);
    };
    const double ratio = err_at(2e-3) / err_at(1e-3);

    IntegratorConfig cfg;
    cfg.dt = 5e-5;
    cfg.t_end = 5.0;
    cfg.k = k;
    cfg.diag_stride = 500;
    ComplexField psi0 =
        solitary_wave(SolitonParams{0.5, 0.0, 1.0, 0.0}, k, 0.0, g);
    TrajectoryRecord rec = evolve_nls(psi0, cfg);
    double dm = 0.0, de = 0.0;
    for (size_t i = 0; i < rec.times.size(); ++i) {
        dm = std::max(dm, std::abs(rec.mass[i] - rec.mass[0]));
        de = std::max(de, std::abs(rec.energy[i] - rec.energy[0]));
    }
    c << "dt-halving error ratio " << ratio << ", mass drift " << dm
      << ", energy drift " << de;
    c.require(std::abs(ratio - 4.0) <= 0.8, "not second order");
    c.require(dm <= 1e-10, "mass drift > 1e-10");
    c.require(de <= 1e-8, "energy drift > 1e-8");
}

void criterion_4(Check& c) { // free dispersive decay
    const auto t0 = std::chrono::steady_clock::now();
    auto g = Grid::make(800.0, 8192);
    // width chosen so the decay onset sits at the window start; the log(1+t)
    // abscissa steepens the fit of the exact peak law (1+16a^2t^2)^{-1/4} to
    // about -0.56 for narrow packets already asymptotic at t = 1
    const double a = 0.1;
    ComplexField f(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        f[j] = std::exp(-a * x * x);
    }
    std::vector<double> ts, vs;
    double closed_form_err = 0.0;
    for (int i = 1; i <= 50; ++i) {
        ts.push_back(static_cast<double>(i));
        vs.push_back(linf_norm(free_propagator(f, ts.back())));
        const double exact =
            std::pow(1.0 + 16.0 * a * a * ts.back() * ts.back(), -0.25);
        closed_form_err =
            std::max(closed_form_err, std::abs(vs.back() - exact) / exact);
    }
    DecayFit fit = fit_decay_exponent(ts, vs, 1.0, 50.0);
    const double elapsed = seconds_since(t0);
    c << "L-inf exponent " << fit.exponent << ", peak-law error "
      << closed_form_err << ", " << elapsed << " s";
    c.require(closed_form_err <= 1e-8, "peak law not reproduced");
    c.require(std::abs(fit.exponent + 0.5) <= 0.05, "exponent not -0.50 +- 0.05");
    c.require(elapsed <= 120.0, "over 2 min budget");
}

void criterion_5(Check& c) { // projection algebra + flow commutation
    auto g = Grid::make(45.0, 1024);
    MultiSolitonConfig cfg;
    cfg.k = 3.0;
    cfg.solitons = {SolitonParams{0.8, 12.0, 0.55, 0.3},
                    SolitonParams{-0.8, -12.0, 0.5, 0.0}};
    DiscreteFrame f0 = build_frame(cfg, 0.0, g);
    const Component comps[] = {Component::unstable, Component::stable,
                               Component::root, Component::continuous};
    double worst = 0.0;
    for (unsigned seed = 1; seed <= 16; ++seed) {
        VectorField u = random_pair(g, seed, 3.0 * (seed % 5) - 6.0);
        const double nu = l2_norm(u);
        VectorField sum(g);
        for (Component comp : comps) {
            VectorField p = project(u, f0, comp);
            sum += p;
            VectorField pp = project(p, f0, comp);
            pp -= p;
            worst = std::max(worst, l2_norm(pp) / nu);
            for (Component other : comps)
                if (other != comp)
                    worst = std::max(worst, l2_norm(project(p, f0, other)) / nu);
        }
        sum -= u;
        worst = std::max(worst, l2_norm(sum) / nu);
    }

    // hyperbolic projection vs the charge-transfer flow over [0, 5]
    const double dt = 1e-3, T = 5.0;
    auto p_h = [&](const VectorField& u, const DiscreteFrame& fr) {
        VectorField out = project(u, fr, Component::unstable);
        out += project(u, fr, Component::stable);
        return out;
    };
    auto evolve_to = [&](VectorField u, double t_end) {
        const int n = static_cast<int>(std::llround(t_end / dt));
        for (int s = 0; s < n; ++s) u = step_charge_transfer(u, s * dt, dt, cfg);
        return u;
    };
    VectorField u0 = random_pair(g, 3u, 5.0);
    VectorField a = evolve_to(u0, T);
    VectorField b = evolve_to(p_h(u0, f0), T);
    DiscreteFrame fT = build_frame(cfg, T, g);
    VectorField defect = p_h(a, fT);
    defect -= b;
    const double comm = l2_norm(defect) / l2_norm(u0);

    c << "worst algebra defect " << worst << ", flow-commutation defect "
      << comm;
    c.require(worst <= 1e-8, "algebra defect > 1e-8");
    c.require(comm <= 1e-3, "commutation defect > 1e-3");
}

void criterion_6(Check& c) { // interaction rate
    auto g = Grid::make(40.0, 4096);
    std::vector<double> seps;
    for (double L = 10.0; L <= 35.0; L += 2.5) seps.push_back(L);
    InteractionScan scan = interaction_scan(3.0, 1.0, seps, g);
    const double rates[4] = {scan.rate_l1, scan.rate_l2, scan.rate_l1_weighted,
                             scan.rate_l2_weighted};
    c << "rates l1 " << rates[0] << ", l2 " << rates[1] << ", weighted "
      << rates[2] << " / " << rates[3];
    for (double r : rates)
        c.require(r >= 0.9 && r <= 1.1, "rate outside [0.9, 1.1]");
}

void criterion_7(Check& c) { // lemma suites
    // closed form: m = 0, alpha = beta = 1 integrates to (2 + zeta) e^{-zeta}
    BoundCheckReport oracle =
        verify_interactt(1.0, 1.0, 0.0, {0.5, 1.0, 2.0, 5.0, 10.0, 20.0});
    double oracle_err = 0.0;
    for (const BoundCheckPoint& pt : oracle.points) {
        const double exact = (2.0 + pt.arg) * std::exp(-pt.arg);
        oracle_err = std::max(oracle_err, std::abs(pt.integral - exact) / exact);
    }

    std::vector<double> zetas, ts;
    for (double z = 1.0; z <= 40.0; z += 1.0) zetas.push_back(z);
    for (double t = 10.0; t <= 1e4; t *= 2.0) ts.push_back(t);
    const BoundCheckReport reps[] = {
        verify_interactt(1.0, 2.0, 2.0, zetas),
        verify_interactt(1.3, 1.3, 1.0, zetas), // equal-exponent branch
        verify_interpol(1.5, 0.5, ts),
        verify_interpol(1.5, 1.0, ts), // b = 1 log branch
        verify_interpol(1.0, 1.5, ts), // a = 1 log branch
    };
    double lo = 1e300, hi = 0.0;
    for (const BoundCheckReport& r : reps) {
        lo = std::min(lo, r.min_ratio);
        hi = std::max(hi, r.max_ratio);
    }
    c << "oracle error " << oracle_err << ", envelope ratios in [" << lo << ", "
      << hi << "]";
    c.require(oracle_err <= 1e-10, "closed-form mismatch > 1e-10");
    c.require(lo >= 1e-3 && hi <= 50.0, "ratio outside [1e-3, 50]");
}

void criterion_8(Check& c) { // shooting dichotomy + manifold scaling
    const auto t0 = std::chrono::steady_clock::now();
    auto g = Grid::make(60.0, 1024);
    MultiSolitonConfig cfg;
    cfg.k = 3.0;
    cfg.solitons = {SolitonParams{0.0, 0.0, 0.45, 0.0}};

    ComplexField r0(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        r0[j] = 1e-3 * std::exp(-x * x / 4.0);
    }
    r0 = remove_unstable_overlap(r0, cfg, g);

    ShotSpec spec;
    spec.sigma0 = cfg;
    spec.grid = g;
    spec.r0 = r0;
    spec.T = 20.0;
    spec.tol = 1e-8;
    spec.dt = 1e-3;
    spec.ladder_steps = 0;
    ShotResult res = shoot(spec);
    double bmax = 0.0;
    for (const cd& b : res.b_terminal) bmax = std::max(bmax, std::abs(b));

    DichotomyReport dich =
        classify_dichotomy(spec, res.h_star, 1e-3, res.sensitive_direction);
    const bool split = (dich.plus == SideBehavior::blowup &&
                        dich.minus == SideBehavior::dispersal) ||
                       (dich.plus == SideBehavior::dispersal &&
                        dich.minus == SideBehavior::blowup);

    ShotSpec scan_spec = spec; // quadratic law is dt-uniform; scan cheaper
    scan_spec.T = 12.0;
    scan_spec.dt = 2e-3;
    ManifoldScan scan = manifold_scan(scan_spec, {0.25, 0.5, 1.0});

    g_shot_spec = spec;
    g_shot_result = res;

    const double elapsed = seconds_since(t0);
    c << "|b(20)| " << bmax << ", dichotomy "
      << (split ? "split" : "NOT split") << ", scan exponent "
      << scan.fit_exponent << ", " << elapsed << " s";
    c.require(bmax <= 1e-8, "|b(T=20)| > 1e-8");
    c.require(split, "no blow-up/dispersal dichotomy");
    c.require(std::abs(scan.fit_exponent - 2.0) <= 0.2, "exponent not 2 +- 0.2");
    c.require(elapsed <= 900.0, "over 15 min budget");
}

void criterion_9(Check& c) { // post-shot decay ordering
    // own shot, bigger perturbation than criterion 8: the Lambda-sigma-dot
    // signal is quadratic in the radiation, and at delta = 1e-3 it sits
    // below the dt^2 splitting bias floor for the whole window
    auto g = Grid::make(60.0, 1024);
    MultiSolitonConfig cfg;
    cfg.k = 3.0;
    cfg.solitons = {SolitonParams{0.0, 0.0, 0.45, 0.0}};

    ComplexField r0(g);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        r0[j] = 1e-2 * std::exp(-x * x / 4.0);
    }
    r0 = remove_unstable_overlap(r0, cfg, g);

    ShotSpec spec;
    spec.sigma0 = cfg;
    spec.grid = g;
    spec.r0 = r0;
    spec.T = 20.0;
    spec.tol = 1e-8;
    spec.dt = 5e-4;
    spec.ladder_steps = 0;
    ShotResult shot = shoot(spec);

    IntegratorConfig ic;
    // must re-use the shot's dt: h* cancels the unstable coefficient of the
    // dt-discrete flow, and the dt^2 mismatch re-amplifies by e^{lambda0 t}
    ic.dt = spec.dt;
    ic.t_end = 30.0;
    ic.k = spec.sigma0.k;
    ic.diag_stride = 1000;
    ic.sponge = spec.sponge;

    std::vector<double> ts, linf_r, wloc;
    std::vector<ModulationState> states;
    MultiSolitonConfig guess = spec.sigma0;
    bool tracking = true;
    double t_lost = ic.t_end;
    evolve_nls(shot.psi0, ic, [&](double t, const ComplexField& psi) {
        if (!tracking) return;
        const double dt_adv = ts.empty() ? t : t - ts.back();
        for (SolitonParams& p : guess.solitons) {
            p.y += p.v * dt_adv;
            p.gamma += (p.alpha * p.alpha - p.v * p.v / 4.0) * dt_adv;
        }
        try {
            ModulationState st = extract_parameters(psi, guess);
            guess = st.sigma;
            ts.push_back(t);
            linf_r.push_back(linf_norm(st.radiation));
            wloc.push_back(
                weighted_norm(st.radiation, st.sigma.solitons[0].y, 2.0));
            states.push_back(std::move(st));
        } catch (const NumericalError&) {
            // late-time extraction can degenerate once the radiation has
            // left the window; fit on the horizon tracked so far
            tracking = false;
            t_lost = t;
        }
    });

    DecayFit flinf = fit_decay_exponent(ts, linf_r, 2.0, 30.0);
    DecayFit fw = fit_decay_exponent(ts, wloc, 2.0, 30.0);

    auto dots = lambda_dot(ts, states);
    std::vector<double> dot_mag;
    for (const auto& row : dots) {
        double m = 0.0;
        for (const LambdaDot& d : row)
            for (double v : {d.y, d.v, d.alpha, d.gamma})
                m = std::max(m, std::abs(v));
        dot_mag.push_back(m);
    }
    DecayFit fdot = fit_decay_exponent(ts, dot_mag, 2.0, 30.0);

    c << "radiation L-inf exponent " << flinf.exponent << ", weighted local-L2 "
      << fw.exponent << ", Lambda-sigma-dot " << fdot.exponent << " ("
      << dot_mag.front() << " -> " << dot_mag.back()
      << "), tracked to t = " << t_lost;
    c.require(flinf.exponent <= -0.4, "L-inf exponent > -0.4");
    c.require(fw.exponent <= flinf.exponent - 0.2,
              "weighted norm not 0.2 steeper");
    c.require(fdot.exponent <= -1.0, "Lambda-sigma-dot exponent > -1");
}

void criterion_10(Check& c) { // virial growth under the charge-transfer flow
    auto g = Grid::make(60.0, 1024);
    MultiSolitonConfig cfg;
    cfg.k = 3.0;
    // moderate alphas: over T = 20 the unstable modes re-amplify projection
    // leakage by e^{lambda0 T}, which must stay small against ||u||
    cfg.solitons = {SolitonParams{0.8, 12.0, 0.45, 0.3},
                    SolitonParams{-0.8, -12.0, 0.4, 0.0}};
    VectorField u = random_pair(g, 3u, 5.0);
    u = project(u, build_frame(cfg, 0.0, g), Component::continuous);

    const double dt = 1e-3, T = 20.0, sample = 0.5;
    const int n_steps = static_cast<int>(std::llround(T / dt));
    const int stride = static_cast<int>(std::llround(sample / dt));
    std::vector<double> ts;
    std::vector<std::vector<double>> moments(2);
    auto record = [&](double t, const VectorField& ut) {
        DiscreteFrame fr = build_frame(cfg, t, g);
        VectorField uc = project(ut, fr, Component::continuous);
        ts.push_back(t);
        for (int l = 0; l < 2; ++l) {
            const SolitonParams& p = cfg.solitons[l];
            std::vector<double> chi = cutoff_chi(g, cfg, l, t);
            const double center = p.y + p.v * t;
            VectorField w = uc;
            for (int j = 0; j < g->n(); ++j) {
                const double wt = chi[j] * std::abs(g->node(j) - center);
                w.first[j] *= wt;
                w.second[j] *= wt;
            }
            moments[l].push_back(l2_norm(w));
        }
    };
    record(0.0, u);
    for (int s = 0; s < n_steps; ++s) {
        u = step_charge_transfer(u, s * dt, dt, cfg);
        if ((s + 1) % stride == 0) record((s + 1) * dt, u);
    }

    // at most linear growth: log-log exponent of the moment vs (1+t) must not
    // exceed 1; the affine envelope constant (least squares inflated to cover
    // every sample) is recorded
    double worst_c = 0.0, worst_exp = -1e9;
    for (int l = 0; l < 2; ++l) {
        DecayFit growth =
            fit_decay_exponent(ts, moments[l], ts.front(), ts.back());
        worst_exp = std::max(worst_exp, growth.exponent);
        AffineFit fit = fit_affine(ts, moments[l]);
        for (size_t i = 0; i < ts.size(); ++i) {
            const double env = fit.a + fit.b * ts[i];
            c.require(env > 0.0, "degenerate affine envelope");
            worst_c = std::max(worst_c, moments[l][i] / env);
        }
    }
    c << "growth exponent " << worst_exp << ", envelope inflation " << worst_c;
    c.require(worst_exp <= 1.0, "super-linear moment growth");
    c.require(worst_c <= 3.0, "moment far above the least-squares envelope");
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    struct Entry {
        int id;
        const char* label;
        std::function<void(Check&)> fn;
    };
    const std::vector<Entry> entries = {
        {1, "spectral identities and H^2-kernel residuals", criterion_1},
        {2, "lambda0 dual provenance, grid convergence, alpha scaling",
         criterion_2},
        {3, "integrator second order, mass/energy conservation", criterion_3},
        {4, "free dispersive L-inf decay t^{-1/2}", criterion_4},
        {5, "projection algebra and flow commutation", criterion_5},
        {6, "two-soliton interaction rate", criterion_6},
        {7, "quadrature lemma suites", criterion_7},
        {8, "shooting dichotomy and quadratic manifold scaling", criterion_8},
        {9, "post-shot decay ordering", criterion_9},
        {10, "virial growth bounded by an affine envelope", criterion_10},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        if (!selected.empty() && !selected.count(e.id)) continue;
        Check c;
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.pass = false;
            c.detail << " [EXCEPTION: " << ex.what() << "]";
        }
        std::printf("%s %2d %s (%s)\n", c.pass ? "PASS" : "FAIL", e.id, e.label,
                    c.detail.str().c_str());
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    return failures;
}
