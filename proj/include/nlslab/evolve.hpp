#pragma once

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/solitons.hpp"

#include <functional>
#include <vector>

namespace nlslab {

struct SpongeConfig {
    bool enabled = false;
    double width = 8.0;   // absorbing layer depth from each box edge
    double strength = 5.0;
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double k = 3.0;
    SpongeConfig sponge;
    int diag_stride = 10;     // record diagnostics every this many steps
    int snapshot_stride = 0;  // 0 = no field snapshots
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> energy;
    std::vector<double> linf;
    std::vector<double> snapshot_times;
    std::vector<ComplexField> snapshots;
};

/// One Strang step of i psi_t + psi_xx + |psi|^{2k} psi = 0:
/// half nonlinear phase (exact), full linear Fourier step (with optional
/// sponge decay), half nonlinear. Throws BlowUpError on overflow/NaN.
ComplexField step_nls(const ComplexField& psi, double dt, double k,
                      const std::vector<double>* sponge = nullptr);

using NlsCallback = std::function<void(double t, const ComplexField& psi)>;

/// Repeated step_nls with diagnostics at the configured stride. The callback
/// observes (t, psi) at every diagnostic point, including t = 0 and t_end.
TrajectoryRecord evolve_nls(const ComplexField& psi0, const IntegratorConfig& cfg,
                            const NlsCallback& callback = {});

/// One Strang step of the linear charge-transfer system
/// i u_t + sigma_z u_xx + W(t,x) u = 0 with the m moving matrix potentials
///   W_l = [ (k+1) Phi_l            k e^{2 i theta_l} Phi_l ]
///         [ -k e^{-2 i theta_l} Phi_l   -(k+1) Phi_l       ],
/// Phi_l = phi_{alpha_l}^{2k}(x - v_l t - y_l), theta_l the soliton phase.
/// Half linear, potential at the midpoint time (closed-form 2x2 exponential),
/// half linear.
VectorField step_charge_transfer(const VectorField& u, double t, double dt,
                                 const MultiSolitonConfig& cfg,
                                 const std::vector<double>* sponge = nullptr);

/// Exact free flow e^{i t d2}: Fourier multiplier e^{-i t xi^2}.
ComplexField free_propagator(const ComplexField& f, double t);

} // namespace nlslab
