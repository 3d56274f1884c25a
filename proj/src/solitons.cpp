#include "nlslab/solitons.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlslab {

namespace {
constexpr double kTailRequirement = 1e-15;
}

void MultiSolitonConfig::validate() const {
    if (solitons.empty())
        throw std::invalid_argument("MultiSolitonConfig: need m >= 1 solitons");
    if (k <= 0.0) throw std::invalid_argument("MultiSolitonConfig: k must be positive");
    for (const auto& p : solitons) {
        if (!(p.alpha > 0.0) || !std::isfinite(p.v) || !std::isfinite(p.y) ||
            !std::isfinite(p.gamma))
            throw std::invalid_argument("MultiSolitonConfig: bad soliton parameters");
    }
    for (size_t i = 0; i + 1 < solitons.size(); ++i) {
        if (!(solitons[i].y > solitons[i + 1].y))
            throw std::invalid_argument("MultiSolitonConfig: centers must decrease");
        if (!(solitons[i].v > solitons[i + 1].v))
            throw std::invalid_argument("MultiSolitonConfig: velocities must decrease");
    }
}

double soliton_phase(const SolitonParams& p, double t, double x) {
    return p.v * x / 2.0 - p.v * p.v * t / 4.0 + p.alpha * p.alpha * t + p.gamma;
}

double ground_state_value(double alpha, double k, double x) {
    // sech^{1/k} evaluated through log-space to stay finite far in the tail
    const double a = k * alpha * std::abs(x);
    // log sech(a) = -a + log(2/(1+e^{-2a}))
    const double log_sech = -a + std::log(2.0 / (1.0 + std::exp(-2.0 * a)));
    const double amp = std::pow(alpha, 1.0 / k) * std::pow(k + 1.0, 0.5 / k);
    return amp * std::exp(log_sech / k);
}

GroundStateResult ground_state(double alpha, double k, const GridPtr& grid) {
    if (!(alpha > 0.0) || !(k > 0.0))
        throw std::invalid_argument("ground_state: alpha and k must be positive");
    GroundStateResult out{ComplexField(grid), 0.0, false};
    for (int j = 0; j < grid->n(); ++j)
        out.phi[j] = ground_state_value(alpha, k, grid->node(j));
    out.edge_value = ground_state_value(alpha, k, grid->half_length());
    out.truncated = out.edge_value > kTailRequirement;
    return out;
}

GroundStateFamily ground_state_family(double alpha, double k, const GridPtr& grid) {
    GroundStateResult gs = ground_state(alpha, k, grid);
    GroundStateFamily fam;
    fam.phi = gs.phi;
    fam.truncated = gs.truncated;
    fam.dphi_dx = ComplexField(grid);
    fam.dphi_dalpha = ComplexField(grid);
    fam.x_phi = ComplexField(grid);
    fam.x_dphi_dx = ComplexField(grid);
    for (int j = 0; j < grid->n(); ++j) {
        const double x = grid->node(j);
        const double phi = fam.phi[j].real();
        const double dphi = -alpha * std::tanh(k * alpha * x) * phi;
        fam.dphi_dx[j] = dphi;
        fam.dphi_dalpha[j] = (phi / k + x * dphi) / alpha;
        fam.x_phi[j] = x * phi;
        fam.x_dphi_dx[j] = x * dphi;
    }
    return fam;
}

ComplexField solitary_wave(const SolitonParams& p, double k, double t,
                           const GridPtr& grid) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("solitary_wave: alpha <= 0");
    ComplexField out(grid);
    const double center = p.v * t + p.y;
    for (int j = 0; j < grid->n(); ++j) {
        const double x = grid->node(j);
        out[j] = std::polar(ground_state_value(p.alpha, k, x - center),
                            soliton_phase(p, t, x));
    }
    return out;
}

ComplexField multi_soliton(const MultiSolitonConfig& cfg, double t,
                           const GridPtr& grid) {
    cfg.validate();
    ComplexField out(grid);
    for (const auto& p : cfg.solitons) out += solitary_wave(p, cfg.k, t, grid);
    return out;
}

VectorField galilean_lift(const VectorField& f, const SolitonParams& p, double t) {
    const double shift = p.y + p.v * t;
    ComplexField a = translate(f.first, shift);
    ComplexField b = translate(f.second, shift);
    const GridPtr& grid = f.grid();
    for (int j = 0; j < grid->n(); ++j) {
        const double theta = soliton_phase(p, t, grid->node(j));
        a[j] *= std::polar(1.0, theta);
        b[j] *= std::polar(1.0, -theta);
    }
    return VectorField(std::move(a), std::move(b));
}

std::vector<double> cutoff_chi(const GridPtr& grid, const MultiSolitonConfig& cfg,
                               int ell, double t, double width_fraction) {
    cfg.validate();
    const int m = cfg.m();
    if (ell < 0 || ell >= m) throw std::invalid_argument("cutoff_chi: bad index");
    std::vector<double> out(grid->n(), 1.0);
    if (m == 1) return out;

    auto center = [&](int i) { return cfg.solitons[i].y + cfg.solitons[i].v * t; };
    // boundary b_i lies between soliton i and i+1 (centers decreasing in i)
    auto boundary = [&](int i) { return 0.5 * (center(i) + center(i + 1)); };
    auto width = [&](int i) {
        return width_fraction * (center(i) - center(i + 1));
    };
    for (int i = 0; i + 1 < m; ++i)
        if (!(center(i) > center(i + 1)))
            throw std::invalid_argument("cutoff_chi: trajectories are not ordered at t");

    // chi_ell = rise_ell - rise_{ell-1} telescopes to an exact partition of
    // unity; rise_i switches 0 -> 1 across boundary i, going right.
    auto rise = [&](int i, double x) {
        return smooth_step(x, boundary(i), width(i));
    };
    for (int j = 0; j < grid->n(); ++j) {
        const double x = grid->node(j);
        const double hi = (ell == m - 1) ? 1.0 : rise(ell, x);
        const double lo = (ell == 0) ? 0.0 : rise(ell - 1, x);
        out[j] = hi - lo;
    }
    return out;
}

HypothesesReport check_hypotheses(const MultiSolitonConfig& cfg,
                                  double velocity_threshold,
                                  double center_threshold, double n_constant) {
    cfg.validate();
    HypothesesReport rep;
    const int m = cfg.m();
    double min_alpha = std::numeric_limits<double>::infinity();
    double max_abs_v = 0.0;
    for (const auto& p : cfg.solitons) {
        min_alpha = std::min(min_alpha, p.alpha);
        max_abs_v = std::max(max_abs_v, std::abs(p.v));
    }
    if (m == 1) {
        rep.min_velocity_gap = std::numeric_limits<double>::infinity();
        rep.min_center_gap = std::numeric_limits<double>::infinity();
        rep.h1_velocity_ok = rep.h1_center_ok = rep.h2_ok = true;
        rep.h2_margin = std::numeric_limits<double>::infinity();
        rep.n_constant = (n_constant > 0.0) ? n_constant
                                            : std::max(max_abs_v, 20.0) + 1.0;
        rep.delta0 = 0.0;
        return rep;
    }
    double min_vgap = std::numeric_limits<double>::infinity();
    double min_ygap = std::numeric_limits<double>::infinity();
    double max_ygap = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
        min_vgap = std::min(min_vgap, cfg.solitons[i].v - cfg.solitons[i + 1].v);
        const double dy = cfg.solitons[i].y - cfg.solitons[i + 1].y;
        min_ygap = std::min(min_ygap, dy);
        max_ygap = std::max(max_ygap, dy);
    }
    rep.min_velocity_gap = min_vgap;
    rep.min_center_gap = min_ygap;
    rep.h1_velocity_ok = min_vgap > velocity_threshold;
    rep.h1_center_ok = min_ygap > center_threshold;
    rep.h2_margin = std::exp(min_alpha * min_ygap / 600.0) - max_ygap;
    rep.h2_ok = rep.h2_margin > 0.0;
    rep.n_constant = (n_constant > 0.0) ? n_constant
                                        : std::max(max_abs_v, 20.0) + 1.0;
    rep.delta0 = rep.n_constant * std::exp(-0.4 * min_alpha * min_ygap);
    return rep;
}

} // namespace nlslab
