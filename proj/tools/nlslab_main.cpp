// Batch driver: spectrum / simulate / shoot / verify subcommands over a JSON
// run config. Exit codes: 0 ok, 2 config error, 3 numerical failure,
// 4 verifier failure. All CSV output is deterministic for a fixed config and
// seed; wall-clock time stamps go only to run_metadata.txt.
#include <CLI11.hpp>

#include "nlslab/config.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/io.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/shooting.hpp"
#include "nlslab/solitons.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nlslab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerifier = 4;

constexpr double kSpectralResidualTol = 1e-6;

std::string num(double v) { return format_number(v); }

void write_metadata(const fs::path& out, const std::string& command,
                    const RunConfig& cfg, int threads) {
    std::ofstream meta(out / "run_metadata.txt");
    const auto now = std::chrono::system_clock::now();
    meta << "command: " << command << "\n"
         << "unix_time: "
         << std::chrono::duration_cast<std::chrono::seconds>(
                now.time_since_epoch())
                .count()
         << "\n"
         << "threads: " << threads << "\n"
         << "seed: " << cfg.perturbation.seed << "\n";
}

ComplexField build_perturbation(const RunConfig& cfg, const GridPtr& grid) {
    const PerturbationConfig& p = cfg.perturbation;
    if (p.shape == "none" || p.amplitude == 0.0) return ComplexField();
    ComplexField r(grid);
    if (p.shape == "gaussian") {
        for (int j = 0; j < grid->n(); ++j) {
            const double x = grid->node(j) - p.center;
            r[j] = p.amplitude * std::exp(-x * x / (p.width * p.width));
        }
    } else { // random: complex white noise under a gaussian envelope
        std::mt19937_64 rng(p.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        double peak = 0.0;
        for (int j = 0; j < grid->n(); ++j) {
            const double x = grid->node(j) - p.center;
            const double env = std::exp(-x * x / (p.width * p.width));
            r[j] = env * cd(normal(rng), normal(rng));
            peak = std::max(peak, std::abs(r[j]));
        }
        if (peak > 0.0) r *= cd(p.amplitude / peak, 0.0);
    }
    if (p.orthogonalize)
        r = remove_unstable_overlap(r, cfg.soliton_config(), grid);
    return r;
}

IntegratorConfig integrator_of(const RunConfig& cfg) {
    IntegratorConfig ic = cfg.integrator;
    ic.k = cfg.k;
    return ic;
}

// --- spectrum -------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, const fs::path& out) {
    GridPtr grid = Grid::make(cfg.grid.L, cfg.grid.N);
    std::set<double> alphas;
    for (const SolitonParams& p : cfg.solitons) alphas.insert(p.alpha);

    CsvWriter summary((out / "spectrum_summary.csv").string());
    summary.row({"alpha", "lambda0", "lambda0_over_alpha2", "eigen_residual",
                 "root_residual_rel_0", "root_residual_rel_1",
                 "root_residual_rel_2", "root_residual_rel_3"});
    std::ofstream text(out / "summary.txt");
    bool residuals_ok = true;
    int idx = 0;
    for (double a : alphas) {
        LinearizedOperator op(a, cfg.k, grid);
        SpectralData sd = discrete_spectrum(op);
        // ||H^2 w|| measured against the grid-level operator bound rho^2
        const double ximax = std::abs(grid->wavenumber(grid->n() / 2));
        double pot = 0.0;
        for (double v : op.pot_a()) pot = std::max(pot, v);
        const double rho = ximax * ximax + a * a + pot;
        std::array<double, 4> root_rel{};
        for (int w = 0; w < 4; ++w)
            root_rel[w] = sd.root_residuals[w] / (rho * rho);
        summary.numeric_row({a, sd.lambda0, sd.lambda0 / (a * a),
                             sd.eigen_residual, root_rel[0], root_rel[1],
                             root_rel[2], root_rel[3]});
        text << "alpha=" << num(a) << " lambda0=" << num(sd.lambda0)
             << " eigen_residual=" << num(sd.eigen_residual) << "\n";

        CsvWriter dump((out / ("eigenpair_" + std::to_string(idx) + ".csv"))
                           .string());
        std::vector<std::string> header = {"x", "zp1_re", "zp1_im", "zp2_re",
                                           "zp2_im"};
        for (int w = 0; w < 4; ++w) {
            header.push_back("root" + std::to_string(w) + "_re");
            header.push_back("root" + std::to_string(w) + "_im");
        }
        dump.row(header);
        for (int j = 0; j < grid->n(); ++j) {
            std::vector<double> row = {grid->node(j), sd.Z_plus.first[j].real(),
                                       sd.Z_plus.first[j].imag(),
                                       sd.Z_plus.second[j].real(),
                                       sd.Z_plus.second[j].imag()};
            for (int w = 0; w < 4; ++w) {
                row.push_back(sd.root[w].first[j].real());
                row.push_back(sd.root[w].first[j].imag());
            }
            dump.numeric_row(row);
        }
        double worst = sd.eigen_residual;
        for (double r : root_rel) worst = std::max(worst, r);
        if (worst > kSpectralResidualTol) {
            residuals_ok = false;
            text << "RESIDUAL CHECK FAILED: alpha=" << num(a) << " worst="
                 << num(worst) << " > " << num(kSpectralResidualTol)
                 << " (grid too coarse?)\n";
        }
        ++idx;
    }
    text << "residual tolerance " << num(kSpectralResidualTol) << ": "
         << (residuals_ok ? "PASS" : "FAIL") << "\n";
    if (!residuals_ok) {
        std::cerr << "spectrum: eigenpair residuals exceed "
                  << kSpectralResidualTol << "; refine the grid\n";
        return kExitNumerical;
    }
    return 0;
}

// --- simulate ---------------------------------------------------------------

struct TrackedRun {
    std::vector<double> times;
    std::vector<double> mass, energy, linf;
    std::vector<ModulationState> states;
    std::vector<double> mod_times;
    bool tracking_ok = true;
    std::string tracking_note;
};

TrackedRun run_tracked(const ComplexField& psi0, const IntegratorConfig& ic,
                       const MultiSolitonConfig& sigma0) {
    TrackedRun run;
    MultiSolitonConfig guess = sigma0;
    evolve_nls(psi0, ic, [&](double t, const ComplexField& psi) {
        ConservedQuantities q = conserved_quantities(psi, ic.k);
        run.times.push_back(t);
        run.mass.push_back(q.mass);
        run.energy.push_back(q.energy);
        run.linf.push_back(linf_norm(psi));
        if (!run.tracking_ok) return;
        // transport the guess so Newton starts near the snapshot parameters
        for (SolitonParams& p : guess.solitons) {
            const double dt_adv = run.mod_times.empty()
                                      ? t
                                      : t - run.mod_times.back();
            p.y += p.v * dt_adv;
            p.gamma += (p.alpha * p.alpha - p.v * p.v / 4.0) * dt_adv;
        }
        try {
            ModulationState st = extract_parameters(psi, guess);
            guess = st.sigma;
            run.mod_times.push_back(t);
            run.states.push_back(std::move(st));
        } catch (const ExtractionFailure& e) {
            run.tracking_ok = false;
            run.tracking_note = "modulation tracking stopped at t=" + num(t) +
                                ": " + e.what();
        }
    });
    return run;
}

void write_modulation_csv(const fs::path& path, const TrackedRun& run) {
    CsvWriter mod(path.string());
    const int m = run.states.empty() ? 0 : run.states.front().sigma.m();
    std::vector<std::string> header = {"t"};
    for (int l = 0; l < m; ++l) {
        const std::string s = std::to_string(l);
        for (const char* f : {"v", "y", "alpha", "gamma", "Ly", "Lv", "La", "Lg"})
            header.push_back(std::string(f) + s);
    }
    header.push_back("radiation_l2");
    header.push_back("radiation_linf");
    header.push_back("max_residual");
    mod.row(header);
    if (run.states.size() < 3) return;
    auto dots = lambda_dot(run.mod_times, run.states);
    for (size_t i = 0; i < run.states.size(); ++i) {
        const ModulationState& st = run.states[i];
        std::vector<double> row = {run.mod_times[i]};
        for (int l = 0; l < m; ++l) {
            const SolitonParams& p = st.sigma.solitons[l];
            const LambdaDot& d = dots[i][l];
            for (double v : {p.v, p.y, p.alpha, p.gamma, d.y, d.v, d.alpha, d.gamma})
                row.push_back(v);
        }
        row.push_back(l2_norm(st.radiation));
        row.push_back(linf_norm(st.radiation));
        row.push_back(st.max_residual());
        mod.numeric_row(row);
    }
}

double max_lambda_dot(const TrackedRun& run) {
    if (run.states.size() < 3) return 0.0;
    auto dots = lambda_dot(run.mod_times, run.states);
    double worst = 0.0;
    for (const auto& row : dots)
        for (const LambdaDot& d : row)
            for (double v : {d.y, d.v, d.alpha, d.gamma})
                worst = std::max(worst, std::abs(v));
    return worst;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out) {
    GridPtr grid = Grid::make(cfg.grid.L, cfg.grid.N);
    MultiSolitonConfig sigma0 = cfg.soliton_config();
    ComplexField psi0 = multi_soliton(sigma0, 0.0, grid);
    ComplexField r0 = build_perturbation(cfg, grid);
    if (r0.grid()) psi0 += r0;

    IntegratorConfig ic = integrator_of(cfg);
    TrackedRun run;
    MultiSolitonConfig guess = sigma0;
    int snap_index = 0;
    CsvWriter snap_idx((out / "snapshots.csv").string());
    snap_idx.row({"t", "file"});
    const int stride_ratio =
        ic.snapshot_stride > 0 && ic.diag_stride > 0
            ? std::max(1, ic.snapshot_stride / ic.diag_stride)
            : 0;
    try {
        int diag_count = 0;
        evolve_nls(psi0, ic, [&](double t, const ComplexField& psi) {
            ConservedQuantities q = conserved_quantities(psi, ic.k);
            run.times.push_back(t);
            run.mass.push_back(q.mass);
            run.energy.push_back(q.energy);
            run.linf.push_back(linf_norm(psi));
            // self-similar collapse arrests at the grid resolution instead of
            // overflowing; crossing 2x the initial peak is the blow-up event
            if (run.linf.back() > 2.0 * run.linf.front()) throw BlowUpError(t);
            if (stride_ratio > 0 && diag_count % stride_ratio == 0) {
                char name[32];
                std::snprintf(name, sizeof(name), "snapshot_%04d.bin",
                              snap_index++);
                write_snapshot((out / name).string(), psi, t);
                snap_idx.row({num(t), name});
            }
            ++diag_count;
            if (!run.tracking_ok) return;
            const double dt_adv =
                run.mod_times.empty() ? t : t - run.mod_times.back();
            for (SolitonParams& p : guess.solitons) {
                p.y += p.v * dt_adv;
                p.gamma += (p.alpha * p.alpha - p.v * p.v / 4.0) * dt_adv;
            }
            try {
                ModulationState st = extract_parameters(psi, guess);
                guess = st.sigma;
                run.mod_times.push_back(t);
                run.states.push_back(std::move(st));
            } catch (const ExtractionFailure& e) {
                run.tracking_ok = false;
                run.tracking_note = "modulation tracking stopped at t=" +
                                    num(t) + ": " + e.what();
            }
        });
    } catch (const BlowUpError& e) {
        // flush partial data, then surface the numerical failure
        CsvWriter traj((out / "trajectory.csv").string());
        traj.row({"t", "mass", "energy", "linf"});
        for (size_t i = 0; i < run.times.size(); ++i)
            traj.numeric_row({run.times[i], run.mass[i], run.energy[i],
                              run.linf[i]});
        std::ofstream text(out / "summary.txt");
        text << "BLOWUP t=" << num(e.t) << "\n";
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitNumerical;
    }

    CsvWriter traj((out / "trajectory.csv").string());
    traj.row({"t", "mass", "energy", "linf"});
    for (size_t i = 0; i < run.times.size(); ++i)
        traj.numeric_row({run.times[i], run.mass[i], run.energy[i], run.linf[i]});
    write_modulation_csv(out / "modulation.csv", run);

    std::ofstream text(out / "summary.txt");
    double mass_drift = 0.0, energy_drift = 0.0;
    for (size_t i = 0; i < run.times.size(); ++i) {
        mass_drift = std::max(mass_drift, std::abs(run.mass[i] - run.mass[0]));
        energy_drift =
            std::max(energy_drift, std::abs(run.energy[i] - run.energy[0]));
    }
    text << "t_end=" << num(run.times.back()) << "\n"
         << "mass_drift=" << num(mass_drift) << "\n"
         << "energy_drift=" << num(energy_drift) << "\n"
         << "final_linf=" << num(run.linf.back()) << "\n"
         << "max_lambda_dot=" << num(max_lambda_dot(run)) << "\n";
    if (!run.tracking_ok) text << run.tracking_note << "\n";
    return 0;
}

// --- shoot ------------------------------------------------------------------

ShotSpec shot_spec_of(const RunConfig& cfg, const GridPtr& grid) {
    ShotSpec spec;
    spec.sigma0 = cfg.soliton_config();
    spec.grid = grid;
    spec.r0 = build_perturbation(cfg, grid);
    spec.T = cfg.shooting.T;
    spec.tol = cfg.shooting.tol;
    spec.stage_T0 = cfg.shooting.stage_T0;
    spec.stage_step = cfg.shooting.stage_step;
    spec.ladder_steps = cfg.shooting.ladder_steps;
    spec.solver = cfg.shooting.solver == "secant" ? ShotSolver::secant
                                                  : ShotSolver::newton_fd;
    spec.dt = cfg.integrator.dt;
    spec.sponge = cfg.integrator.sponge.enabled
                      ? cfg.integrator.sponge
                      : SpongeConfig{true, 8.0, 5.0};
    return spec;
}

int cmd_shoot(const RunConfig& cfg, const fs::path& out) {
    GridPtr grid = Grid::make(cfg.grid.L, cfg.grid.N);
    ShotSpec spec = shot_spec_of(cfg, grid);
    const int m = spec.sigma0.m();

    ShotResult res = shoot(spec);

    CsvWriter iters((out / "shot_iterations.csv").string());
    std::vector<std::string> header = {"T"};
    for (int l = 0; l < m; ++l) {
        header.push_back("h" + std::to_string(l) + "_re");
        header.push_back("h" + std::to_string(l) + "_im");
    }
    header.push_back("residual");
    iters.row(header);
    for (const ShotIteration& it : res.history) {
        std::vector<double> row = {it.T};
        for (const cd& h : it.h) {
            row.push_back(h.real());
            row.push_back(h.imag());
        }
        row.push_back(it.residual);
        iters.numeric_row(row);
    }

    CsvWriter hs((out / "h_star.csv").string());
    hs.row({"soliton", "h_re", "h_im", "b_re", "b_im"});
    for (int l = 0; l < m; ++l)
        hs.numeric_row({static_cast<double>(l), res.h_star[l].real(),
                        res.h_star[l].imag(), res.b_terminal[l].real(),
                        res.b_terminal[l].imag()});
    write_snapshot((out / "psi0.bin").string(), res.psi0, 0.0);

    std::ofstream text(out / "shot_summary.txt");
    double hmax = 0.0, bmax = 0.0;
    for (int l = 0; l < m; ++l) {
        hmax = std::max(hmax, std::abs(res.h_star[l]));
        bmax = std::max(bmax, std::abs(res.b_terminal[l]));
    }
    text << "T=" << num(spec.T) << " tol=" << num(spec.tol) << "\n"
         << "max|h*|=" << num(hmax) << "\n"
         << "max|b(T)|=" << num(bmax) << "\n"
         << "sensitivity_rank=" << res.sensitivity_rank << " (of " << 2 * m
         << " real directions)\n";
    for (size_t j = 0; j < res.ladder_h_diff.size(); ++j)
        text << "ladder_diff_" << j << "=" << num(res.ladder_h_diff[j]) << "\n";
    const double r0_norm = spec.r0.grid() ? l2_norm(spec.r0) : 0.0;
    if (r0_norm == 0.0)
        text << "r0=0: max|h*|=" << num(hmax)
             << " is pure discretization leakage (h*=0 in the continuum)\n";

    // post-shot evolution: radiation decay fit
    IntegratorConfig ic = integrator_of(cfg);
    ic.sponge = spec.sponge;
    TrackedRun run = run_tracked(res.psi0, ic, spec.sigma0);
    write_modulation_csv(out / "post_shot_modulation.csv", run);
    CsvWriter decay((out / "decay_fit.csv").string());
    decay.row({"t", "radiation_linf", "radiation_l2"});
    std::vector<double> linf_series;
    for (size_t i = 0; i < run.states.size(); ++i) {
        const double li = linf_norm(run.states[i].radiation);
        linf_series.push_back(li);
        decay.numeric_row({run.mod_times[i], li, l2_norm(run.states[i].radiation)});
    }
    text << "decay fit:\n";
    const bool has_radiation =
        !linf_series.empty() && linf_series.front() > 1e-12;
    if (has_radiation && run.mod_times.back() > 2.0) {
        try {
            DecayFit fit = fit_decay_exponent(run.mod_times, linf_series, 1.0,
                                              run.mod_times.back());
            text << "  radiation_linf exponent=" << num(fit.exponent)
                 << " r2=" << num(fit.r_squared) << " window=[" << num(fit.t0)
                 << "," << num(fit.t1) << "]\n";
        } catch (const std::invalid_argument& e) {
            text << "  decay fit unavailable: " << e.what() << "\n";
        }
    } else {
        text << "  no radiation to fit (r0=0 run)\n";
    }
    if (!run.tracking_ok) text << run.tracking_note << "\n";

    if (!cfg.shooting.scan_scales.empty()) {
        ManifoldScan scan = manifold_scan(spec, cfg.shooting.scan_scales);
        CsvWriter sc((out / "manifold_scan.csv").string());
        std::vector<std::string> hd = {"s", "h_norm"};
        for (int l = 0; l < m; ++l) {
            hd.push_back("h" + std::to_string(l) + "_re");
            hd.push_back("h" + std::to_string(l) + "_im");
        }
        sc.row(hd);
        for (const ManifoldPoint& pt : scan.points) {
            std::vector<double> row = {pt.s, pt.h_norm};
            for (const cd& h : pt.h_star) {
                row.push_back(h.real());
                row.push_back(h.imag());
            }
            sc.numeric_row(row);
        }
        text << "manifold scan:\n"
             << "  fit_exponent=" << num(scan.fit_exponent) << "\n"
             << "  max_lipschitz=" << num(scan.max_lipschitz) << "\n";
    }
    return 0;
}

// --- verify -----------------------------------------------------------------

struct VerifyCase {
    std::string name;
    bool pass = false;
    double measured_lo = 0.0, measured_hi = 0.0;
    double bound_lo = 0.0, bound_hi = 0.0;
};

int cmd_verify(const RunConfig& cfg, const fs::path& out) {
    const VerifierConfig& vc = cfg.verifier;
    std::vector<VerifyCase> cases;
    CsvWriter detail((out / "verify_points.csv").string());
    detail.row({"case", "arg", "integral", "envelope", "ratio"});

    auto ratio_case = [&](const std::string& name, const BoundCheckReport& rep) {
        for (const BoundCheckPoint& pt : rep.points)
            detail.row({name, num(pt.arg), num(pt.integral), num(pt.envelope),
                        num(pt.ratio)});
        VerifyCase c;
        c.name = name;
        c.measured_lo = rep.min_ratio;
        c.measured_hi = rep.max_ratio;
        c.bound_lo = vc.ratio_lower;
        c.bound_hi = vc.ratio_upper;
        c.pass = rep.min_ratio >= vc.ratio_lower && rep.max_ratio <= vc.ratio_upper;
        cases.push_back(c);
    };

    for (const std::string& which : vc.select) {
        if (which == "interactt") {
            std::vector<double> zetas;
            for (double z = 1.0; z <= 40.0; z += 1.0) zetas.push_back(z);
            ratio_case("interactt a=1 b=2 m=2", verify_interactt(1.0, 2.0, 2.0, zetas));
            ratio_case("interactt a=b=1.3 m=1 (equal exponents)",
                       verify_interactt(1.3, 1.3, 1.0, zetas));
            ratio_case("interactt a=2 b=1 m=0", verify_interactt(2.0, 1.0, 0.0, zetas));
        } else if (which == "interpol") {
            std::vector<double> ts;
            for (double t = 10.0; t <= 1e4; t *= 2.0) ts.push_back(t);
            ratio_case("interpol a=1.5 b=0.5", verify_interpol(1.5, 0.5, ts));
            ratio_case("interpol a=1.5 b=1 (log branch)", verify_interpol(1.5, 1.0, ts));
            ratio_case("interpol a=1 b=1.5 (log branch)", verify_interpol(1.0, 1.5, ts));
        } else if (which == "interaction") {
            GridPtr grid = Grid::make(std::max(cfg.grid.L, 40.0), cfg.grid.N);
            std::vector<double> seps;
            for (double L = 10.0; L <= 35.0; L += 2.5) seps.push_back(L);
            InteractionScan scan = interaction_scan(cfg.k, 1.0, seps, grid);
            CsvWriter sc((out / "interaction_scan.csv").string());
            sc.row({"separation", "l1", "l2", "l1_weighted", "l2_weighted",
                    "dropped"});
            for (const InteractionPoint& pt : scan.points)
                sc.numeric_row({pt.separation, pt.l1, pt.l2, pt.l1_weighted,
                                pt.l2_weighted, pt.dropped ? 1.0 : 0.0});
            const double rates[4] = {scan.rate_l1, scan.rate_l2,
                                     scan.rate_l1_weighted,
                                     scan.rate_l2_weighted};
            const char* names[4] = {"l1", "l2", "l1_weighted", "l2_weighted"};
            for (int i = 0; i < 4; ++i) {
                VerifyCase c;
                c.name = std::string("interaction rate ") + names[i];
                c.measured_lo = c.measured_hi = rates[i];
                c.bound_lo = vc.rate_lo;
                c.bound_hi = vc.rate_hi;
                c.pass = rates[i] >= vc.rate_lo && rates[i] <= vc.rate_hi;
                cases.push_back(c);
            }
        }
    }

    CsvWriter rep((out / "verify_report.csv").string());
    rep.row({"case", "pass", "measured_lo", "measured_hi", "bound_lo",
             "bound_hi"});
    std::ofstream text(out / "summary.txt");
    bool all_pass = true;
    for (const VerifyCase& c : cases) {
        rep.row({c.name, c.pass ? "1" : "0", num(c.measured_lo),
                 num(c.measured_hi), num(c.bound_lo), num(c.bound_hi)});
        text << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=["
             << num(c.measured_lo) << "," << num(c.measured_hi) << "] bound=["
             << num(c.bound_lo) << "," << num(c.bound_hi) << "]\n";
        if (!c.pass) {
            all_pass = false;
            std::cerr << "verify: FAIL " << c.name << " measured=["
                      << num(c.measured_lo) << "," << num(c.measured_hi)
                      << "]\n";
        }
    }
    text << (all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
    return all_pass ? 0 : kExitVerifier;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D focusing NLS multi-soliton toolbox"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--threads", threads, "worker threads for scans");
    app.add_option("--seed", seed, "RNG seed override")
        ->each([&](const std::string&) { seed_given = true; });

    CLI::App* sub_spectrum = app.add_subcommand("spectrum",
        "eigenpairs and root basis of the linearized operator");
    CLI::App* sub_simulate = app.add_subcommand("simulate",
        "nonlinear evolution with modulation tracking");
    CLI::App* sub_shoot = app.add_subcommand("shoot",
        "center-stable manifold shooting");
    CLI::App* sub_verify = app.add_subcommand("verify",
        "quantitative bound verifiers");
    for (CLI::App* s : {sub_spectrum, sub_simulate, sub_shoot, sub_verify})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_given) cfg.perturbation.seed = seed;
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    fs::path out(cfg.output_dir);
    std::string command;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << out << "\n";
        return kExitConfig;
    }

    try {
        if (sub_spectrum->parsed()) command = "spectrum";
        else if (sub_simulate->parsed()) command = "simulate";
        else if (sub_shoot->parsed()) command = "shoot";
        else command = "verify";
        write_metadata(out, command, cfg, threads);
        save_config((out / "config_used.json").string(), cfg);

        if (command == "spectrum") return cmd_spectrum(cfg, out);
        if (command == "simulate") return cmd_simulate(cfg, out);
        if (command == "shoot") return cmd_shoot(cfg, out);
        return cmd_verify(cfg, out);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumerical;
    } catch (const VerifierFailure& e) {
        std::cerr << e.what() << "\n";
        return kExitVerifier;
    }
}
