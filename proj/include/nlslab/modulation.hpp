#pragma once

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/solitons.hpp"

#include <vector>

namespace nlslab {

/// psi = Q_sigma + u with u sigma_z-orthogonal to the 4m lifted root vectors.
/// Convention: sigma holds the instantaneous snapshot parameters, i.e.
/// Q_sigma(x) = sum e^{i(v x/2 + gamma)} phi_alpha(x - y); along a trajectory
/// y(t) and gamma(t) absorb the transport and phase accumulation.
struct ModulationState {
    MultiSolitonConfig sigma;
    ComplexField radiation;         // u = psi - Q_sigma
    std::vector<double> residuals;  // 4 orthogonality constraints per soliton
    int iterations = 0;

    double max_residual() const;
};

/// Lambda-corrected parameter velocities of one soliton (zero on an exact
/// solitary wave): Ly = ydot - v, Lv = vdot, La = alphadot,
/// Lg = gammadot - alpha^2 + v^2/4 + y vdot / 2.
struct LambdaDot {
    double y = 0.0;
    double v = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
};

struct ExtractOptions {
    double tol = 1e-10;  // on max residual, relative to ||psi||_2
    int max_iter = 50;
    bool analytic_jacobian = true; // else full finite-difference Jacobian
    double fd_step = 1e-6;
};

/// The 4m constraint values Im<psi - Q_sigma, Z_{l,w}> at the given sigma
/// (no iteration); diagnostic / oracle hook for the Newton system.
std::vector<double> orthogonality_residuals(const ComplexField& psi,
                                            const MultiSolitonConfig& sigma);

/// Newton iteration on the 4m constraints Im<psi - Q_sigma, Z_{l,w}> = 0,
/// Z_{l,w} the lifted unit root vectors at the current sigma. Throws
/// ExtractionFailure (with the best residual reached) on divergence,
/// collapsing alpha, or residual increase that damping cannot fix.
ModulationState extract_parameters(const ComplexField& psi,
                                   const MultiSolitonConfig& guess,
                                   const ExtractOptions& opt = {});

/// Warm-started extraction along a snapshot series. jump_bound limits the
/// per-snapshot change of any parameter (gamma compared modulo nothing: the
/// series stays unwrapped). Throws ExtractionFailure with a time stamp.
std::vector<ModulationState> track_modulation(
    const std::vector<double>& times, const std::vector<ComplexField>& snapshots,
    const MultiSolitonConfig& sigma0, double jump_bound = 0.5,
    const ExtractOptions& opt = {});

/// Centered finite differences of the extracted series (one-sided at the
/// ends); requires >= 3 time points. Outer index: time; inner: soliton.
std::vector<std::vector<LambdaDot>> lambda_dot(
    const std::vector<double>& times, const std::vector<ModulationState>& states);

} // namespace nlslab
