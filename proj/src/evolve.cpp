#include "nlslab/evolve.hpp"

#include <cmath>
#include <cstdio>

namespace nlslab {

namespace {

constexpr double kBlowUpThreshold = 1e8;

void check_finite(const ComplexField& psi, double t) {
    if (!psi.finite() || linf_norm(psi) > kBlowUpThreshold) throw BlowUpError(t);
}

// sin(z)/z, stable near zero
cd sinc(cd z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

void linear_half(ComplexField& a, ComplexField& b, double dt,
                 const std::vector<double>* sponge) {
    const Grid& g = *a.grid();
    g.fft(a.values().data());
    g.fft(b.values().data());
    for (int j = 0; j < g.n(); ++j) {
        const double xi2 = g.wavenumber(j) * g.wavenumber(j);
        a[j] *= std::polar(1.0, -dt * xi2);
        b[j] *= std::polar(1.0, dt * xi2);
    }
    g.ifft(a.values().data());
    g.ifft(b.values().data());
    if (sponge) {
        for (int j = 0; j < g.n(); ++j) {
            const double decay = std::exp(-dt * (*sponge)[j]);
            a[j] *= decay;
            b[j] *= decay;
        }
    }
}

} // namespace

ComplexField step_nls(const ComplexField& psi, double dt, double k,
                      const std::vector<double>* sponge) {
    const Grid& g = *psi.grid();
    ComplexField out = psi;

    double max_abs = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double a2 = std::norm(out[j]);
        max_abs = std::max(max_abs, a2);
        out[j] *= std::polar(1.0, 0.5 * dt * std::pow(a2, k));
    }
    static bool warned = false;
    if (!warned && std::abs(dt) * std::pow(max_abs, k) > 1.0) {
        std::fprintf(stderr,
                     "step_nls: dt * max|psi|^{2k} = %.3g > 1, "
                     "splitting error may be large\n",
                     std::abs(dt) * std::pow(max_abs, k));
        warned = true;
    }

    g.fft(out.values().data());
    for (int j = 0; j < g.n(); ++j) {
        const double xi = g.wavenumber(j);
        out[j] *= std::polar(1.0, -dt * xi * xi);
    }
    g.ifft(out.values().data());
    if (sponge)
        for (int j = 0; j < g.n(); ++j) out[j] *= std::exp(-dt * (*sponge)[j]);

    for (int j = 0; j < g.n(); ++j)
        out[j] *= std::polar(1.0, 0.5 * dt * std::pow(std::norm(out[j]), k));
    return out;
}

TrajectoryRecord evolve_nls(const ComplexField& psi0, const IntegratorConfig& cfg,
                            const NlsCallback& callback) {
    if (!(cfg.dt > 0.0) || cfg.t_end < 0.0)
        throw std::invalid_argument("evolve_nls: need dt > 0, t_end >= 0");
    const Grid& g = *psi0.grid();
    std::vector<double> sponge;
    if (cfg.sponge.enabled)
        sponge = sponge_profile(g, cfg.sponge.width, cfg.sponge.strength);
    const std::vector<double>* sp = cfg.sponge.enabled ? &sponge : nullptr;

    TrajectoryRecord rec;
    auto record = [&](double t, const ComplexField& psi) {
        rec.times.push_back(t);
        const double m = l2_norm(psi);
        rec.mass.push_back(m * m);
        ComplexField dpsi = spectral_derivative(psi, 1);
        double e = 0.0;
        for (int j = 0; j < g.n(); ++j)
            e += std::norm(dpsi[j]) -
                 std::pow(std::norm(psi[j]), cfg.k + 1.0) / (cfg.k + 1.0);
        rec.energy.push_back(e * g.spacing());
        rec.linf.push_back(linf_norm(psi));
        if (callback) callback(t, psi);
    };

    ComplexField psi = psi0;
    const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    const int stride = std::max(1, cfg.diag_stride);
    record(0.0, psi);
    if (cfg.snapshot_stride > 0) {
        rec.snapshot_times.push_back(0.0);
        rec.snapshots.push_back(psi);
    }
    for (int s = 0; s < n_steps; ++s) {
        psi = step_nls(psi, cfg.dt, cfg.k, sp);
        const double t = (s + 1) * cfg.dt;
        check_finite(psi, t);
        if ((s + 1) % stride == 0 || s + 1 == n_steps) record(t, psi);
        if (cfg.snapshot_stride > 0 &&
            ((s + 1) % cfg.snapshot_stride == 0 || s + 1 == n_steps)) {
            rec.snapshot_times.push_back(t);
            rec.snapshots.push_back(psi);
        }
    }
    return rec;
}

VectorField step_charge_transfer(const VectorField& u, double t, double dt,
                                 const MultiSolitonConfig& cfg,
                                 const std::vector<double>* sponge) {
    const Grid& g = *u.grid();
    VectorField out = u;
    linear_half(out.first, out.second, dt / 2.0, sponge);

    const double tm = t + dt / 2.0; // midpoint-time potentials
    for (int j = 0; j < g.n(); ++j) {
        const double x = g.node(j);
        double a = 0.0;
        cd b(0.0, 0.0);
        for (const auto& p : cfg.solitons) {
            const double phi =
                ground_state_value(p.alpha, cfg.k, x - p.v * tm - p.y);
            const double p2k = std::pow(phi, 2.0 * cfg.k);
            if (p2k == 0.0) continue;
            a += (cfg.k + 1.0) * p2k;
            b += cfg.k * p2k * std::polar(1.0, 2.0 * soliton_phase(p, tm, x));
        }
        // W = [[a, b], [-conj(b), -a]] has W^2 = (a^2 - |b|^2) Id, so
        // exp(i dt W) = cos(dt s) Id + i dt sinc(dt s) W, s = sqrt(a^2-|b|^2).
        const cd s = std::sqrt(cd(a * a - std::norm(b), 0.0));
        const cd c = std::cos(dt * s);
        const cd f = cd(0.0, dt) * sinc(dt * s);
        const cd u1 = out.first[j], u2 = out.second[j];
        out.first[j] = c * u1 + f * (a * u1 + b * u2);
        out.second[j] = c * u2 + f * (-std::conj(b) * u1 - a * u2);
    }

    linear_half(out.first, out.second, dt / 2.0, sponge);
    if (!out.first.finite() || !out.second.finite() ||
        linf_norm(out) > kBlowUpThreshold)
        throw BlowUpError(t + dt);
    return out;
}

ComplexField free_propagator(const ComplexField& f, double t) {
    const Grid& g = *f.grid();
    ComplexField out = f;
    g.fft(out.values().data());
    for (int j = 0; j < g.n(); ++j) {
        const double xi = g.wavenumber(j);
        out[j] *= std::polar(1.0, -t * xi * xi);
    }
    g.ifft(out.values().data());
    return out;
}

} // namespace nlslab
