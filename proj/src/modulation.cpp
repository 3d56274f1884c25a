#include "nlslab/modulation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace nlslab {

double ModulationState::max_residual() const {
    double m = 0.0;
    for (double r : residuals) m = std::max(m, std::abs(r));
    return m;
}

namespace {

struct SolitonProfiles {
    // scalar (first-component) profiles at the snapshot convention t = 0
    ComplexField Q;       // e^{i theta} phi(s)
    ComplexField dQ_dy;   // -e^{i theta} phi'(s)
    ComplexField dQ_da;   // e^{i theta} d_alpha phi(s)
    std::array<ComplexField, 4> z; // unit constraint vectors phi', i phi, i s phi, d_alpha phi
};

SolitonProfiles profiles(const SolitonParams& p, double k, const GridPtr& g) {
    SolitonProfiles out{ComplexField(g), ComplexField(g), ComplexField(g),
                        {ComplexField(g), ComplexField(g), ComplexField(g),
                         ComplexField(g)}};
    const cd i1(0.0, 1.0);
    for (int j = 0; j < g->n(); ++j) {
        const double x = g->node(j);
        const double s = x - p.y;
        const double phi = ground_state_value(p.alpha, k, s);
        const double dphi = -p.alpha * std::tanh(k * p.alpha * s) * phi;
        const double daphi = (phi / k + s * dphi) / p.alpha;
        const cd ph = std::polar(1.0, p.v * x / 2.0 + p.gamma);
        out.Q[j] = ph * phi;
        out.dQ_dy[j] = -ph * dphi;
        out.dQ_da[j] = ph * daphi;
        out.z[0][j] = ph * dphi;
        out.z[1][j] = i1 * ph * phi;
        out.z[2][j] = i1 * ph * (s * phi);
        out.z[3][j] = ph * daphi;
    }
    for (auto& zw : out.z) {
        const double n = l2_norm(zw);
        zw *= cd(1.0 / n);
    }
    return out;
}

// Im<f, g> with the L2 inner product
double im_pair(const ComplexField& f, const ComplexField& g) {
    return inner_product(f, g).imag();
}

struct ConstraintEval {
    std::vector<SolitonProfiles> prof;
    ComplexField Q;
    Eigen::VectorXd F; // 4 per soliton
};

ConstraintEval evaluate(const ComplexField& psi, const MultiSolitonConfig& sig) {
    const GridPtr& g = psi.grid();
    ConstraintEval ev;
    ev.Q = ComplexField(g);
    for (const auto& p : sig.solitons) {
        ev.prof.push_back(profiles(p, sig.k, g));
        ev.Q += ev.prof.back().Q;
    }
    ComplexField u = psi;
    u -= ev.Q;
    ev.F.resize(4 * sig.m());
    for (int l = 0; l < sig.m(); ++l)
        for (int w = 0; w < 4; ++w)
            ev.F(4 * l + w) = im_pair(u, ev.prof[l].z[w]);
    return ev;
}

void apply_step(MultiSolitonConfig& sig, const Eigen::VectorXd& d, double s) {
    for (int l = 0; l < sig.m(); ++l) {
        sig.solitons[l].v += s * d(4 * l + 0);
        sig.solitons[l].y += s * d(4 * l + 1);
        sig.solitons[l].alpha += s * d(4 * l + 2);
        sig.solitons[l].gamma += s * d(4 * l + 3);
    }
}

} // namespace

std::vector<double> orthogonality_residuals(const ComplexField& psi,
                                            const MultiSolitonConfig& sigma) {
    ConstraintEval ev = evaluate(psi, sigma);
    return std::vector<double>(ev.F.data(), ev.F.data() + ev.F.size());
}

ModulationState extract_parameters(const ComplexField& psi,
                                   const MultiSolitonConfig& guess,
                                   const ExtractOptions& opt) {
    guess.validate();
    const GridPtr& g = psi.grid();
    const double scale = l2_norm(psi);
    const double tol = opt.tol * std::max(scale, 1e-30);
    const cd i1(0.0, 1.0);

    MultiSolitonConfig sig = guess;
    ConstraintEval ev = evaluate(psi, sig);
    double res = ev.F.cwiseAbs().maxCoeff();
    double best = res;
    int iter = 0;

    while (res > tol && iter < opt.max_iter) {
        const int n = 4 * sig.m();
        Eigen::MatrixXd J(n, n);
        if (opt.analytic_jacobian) {
            // dF_{lw}/dp = -Im< dQ_{l'}/dp, z_{lw} >; the z-derivative term is
            // O(||u||) near the solution and dropped (quasi-Newton)
            for (int lp = 0; lp < sig.m(); ++lp) {
                const auto& pr = ev.prof[lp];
                ComplexField dv(g), dg(g);
                for (int j = 0; j < g->n(); ++j) {
                    dv[j] = i1 * (g->node(j) / 2.0) * pr.Q[j];
                    dg[j] = i1 * pr.Q[j];
                }
                for (int l = 0; l < sig.m(); ++l)
                    for (int w = 0; w < 4; ++w) {
                        J(4 * l + w, 4 * lp + 0) = -im_pair(dv, ev.prof[l].z[w]);
                        J(4 * l + w, 4 * lp + 1) = -im_pair(pr.dQ_dy, ev.prof[l].z[w]);
                        J(4 * l + w, 4 * lp + 2) = -im_pair(pr.dQ_da, ev.prof[l].z[w]);
                        J(4 * l + w, 4 * lp + 3) = -im_pair(dg, ev.prof[l].z[w]);
                    }
            }
        } else {
            for (int c = 0; c < n; ++c) {
                MultiSolitonConfig pert = sig;
                Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
                e(c) = 1.0;
                apply_step(pert, e, opt.fd_step);
                ConstraintEval evp = evaluate(psi, pert);
                J.col(c) = (evp.F - ev.F) / opt.fd_step;
            }
        }

        Eigen::VectorXd d = J.partialPivLu().solve(-ev.F);
        if (!d.allFinite())
            throw ExtractionFailure("modulation Newton: singular Jacobian", best);

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 12 && !accepted; ++h, step *= 0.5) {
            MultiSolitonConfig trial = sig;
            apply_step(trial, d, step);
            bool ok = true;
            for (const auto& p : trial.solitons) ok = ok && p.alpha > 0.0;
            if (!ok) continue;
            ConstraintEval evt = evaluate(psi, trial);
            const double rt = evt.F.cwiseAbs().maxCoeff();
            if (rt < res || rt <= tol) {
                sig = trial;
                ev = std::move(evt);
                res = rt;
                accepted = true;
            }
        }
        ++iter;
        if (!accepted)
            throw ExtractionFailure(
                "modulation Newton stalled at residual " + std::to_string(best),
                best);
        best = std::min(best, res);
    }
    if (res > tol)
        throw ExtractionFailure(
            "modulation Newton did not converge: residual " + std::to_string(res),
            res);

    ModulationState st;
    st.sigma = sig;
    st.radiation = psi;
    st.radiation -= ev.Q;
    st.residuals.assign(ev.F.data(), ev.F.data() + ev.F.size());
    st.iterations = iter;
    return st;
}

std::vector<ModulationState> track_modulation(
    const std::vector<double>& times, const std::vector<ComplexField>& snapshots,
    const MultiSolitonConfig& sigma0, double jump_bound,
    const ExtractOptions& opt) {
    if (times.size() != snapshots.size())
        throw std::invalid_argument("track_modulation: times/snapshots mismatch");
    std::vector<ModulationState> out;
    MultiSolitonConfig guess = sigma0;
    for (size_t i = 0; i < times.size(); ++i) {
        ModulationState st;
        try {
            st = extract_parameters(snapshots[i], guess, opt);
        } catch (const ExtractionFailure& e) {
            throw ExtractionFailure("t = " + std::to_string(times[i]) + ": " +
                                        e.what(),
                                    e.best_residual);
        }
        if (!out.empty()) {
            for (int l = 0; l < guess.m(); ++l) {
                const auto& a = out.back().sigma.solitons[l];
                const auto& b = st.sigma.solitons[l];
                const double jump =
                    std::max({std::abs(a.v - b.v), std::abs(a.y - b.y),
                              std::abs(a.alpha - b.alpha),
                              std::abs(a.gamma - b.gamma)});
                if (jump > jump_bound)
                    throw ExtractionFailure(
                        "t = " + std::to_string(times[i]) +
                            ": parameter jump " + std::to_string(jump) +
                            " exceeds bound",
                        st.max_residual());
            }
        }
        guess = st.sigma;
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<std::vector<LambdaDot>> lambda_dot(
    const std::vector<double>& times,
    const std::vector<ModulationState>& states) {
    const size_t n = times.size();
    if (n < 3 || states.size() != n)
        throw std::invalid_argument("lambda_dot: need >= 3 aligned time points");
    const int m = states.front().sigma.m();

    auto param = [&](size_t i, int l, int p) {
        const auto& s = states[i].sigma.solitons[l];
        switch (p) {
            case 0: return s.v;
            case 1: return s.y;
            case 2: return s.alpha;
            default: return s.gamma;
        }
    };
    std::vector<std::vector<LambdaDot>> out(n, std::vector<LambdaDot>(m));
    for (size_t i = 0; i < n; ++i) {
        const size_t a = i == 0 ? 0 : i - 1;
        const size_t b = i + 1 == n ? i : i + 1;
        const double dt = times[b] - times[a];
        for (int l = 0; l < m; ++l) {
            const double vdot = (param(b, l, 0) - param(a, l, 0)) / dt;
            const double ydot = (param(b, l, 1) - param(a, l, 1)) / dt;
            const double adot = (param(b, l, 2) - param(a, l, 2)) / dt;
            const double gdot = (param(b, l, 3) - param(a, l, 3)) / dt;
            const auto& s = states[i].sigma.solitons[l];
            out[i][l].y = ydot - s.v;
            out[i][l].v = vdot;
            out[i][l].alpha = adot;
            out[i][l].gamma =
                gdot - s.alpha * s.alpha + s.v * s.v / 4.0 + s.y * vdot / 2.0;
        }
    }
    return out;
}

} // namespace nlslab
