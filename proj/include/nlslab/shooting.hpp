#pragma once

#include "nlslab/errors.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/projections.hpp"
#include "nlslab/solitons.hpp"

#include <optional>
#include <vector>

namespace nlslab {

/// ||r||_{H^2} + ||<x> r||_{L^2} + ||<x> r||_{W^{1,1}}.
double sigma_space_norm(const ComplexField& r);

enum class ShotSolver { secant, newton_fd };

struct ShotSpec {
    MultiSolitonConfig sigma0;      // initial soliton configuration
    GridPtr grid;
    ComplexField r0;                // perturbation (empty field = zero)
    double T = 20.0;                // terminal time for the stabilization
    double tol = 1e-8;              // on |b_+(T)|
    ShotSolver solver = ShotSolver::newton_fd;
    std::vector<cd> h0;             // initial guess, one per soliton (empty = 0)
    double dt = 1e-3;
    SpongeConfig sponge{true, 8.0, 5.0};
    double stage_T0 = 8.0;          // first horizon of the T-continuation
    double stage_step = 4.0;
    int max_iter = 30;              // Newton/secant iterations per stage
    int ladder_steps = 2;           // verification horizons T+1, ..., T+n
};

struct ShotIteration {
    double T = 0.0;
    std::vector<cd> h;
    double residual = 0.0; // max_l |b_{l,+}(T)|
};

struct ShotResult {
    std::vector<cd> h_star;
    std::vector<cd> b_terminal;         // b_+(T) at h_star
    ComplexField psi0;                  // seeded initial data at h_star
    ComplexField g_estimate;            // discrete part added to r0
    std::vector<ShotIteration> history; // accepted iterations, all stages
    std::vector<double> ladder_h_diff;  // |h*(T+j+1) - h*(T+j)|
    int sensitivity_rank = 0;           // rank of the final 2m x 2m Jacobian
    std::vector<cd> sensitive_direction; // top singular direction of b_+(T; h)
};

/// Removes the unstable-dual overlap of the physical lift (r, conj r) by
/// subtracting complex multiples of the lifted Z+ profiles (real-linear 2m
/// system, one refinement sweep). Seeds built from the result carry only
/// O(||r||^2) unstable content, so h* scales quadratically.
ComplexField remove_unstable_overlap(const ComplexField& r,
                                     const MultiSolitonConfig& cfg,
                                     const GridPtr& grid);

/// Initial data Q_sigma + r0 + sum h_l (lifted Z+) + E with E in the root
/// span solved (linear 4m system) so the modulation orthogonality conditions
/// hold exactly at t = 0.
ComplexField seed_initial_data(const ShotSpec& spec, const std::vector<cd>& h);

/// b_+ coefficients of u = psi - Q_sigma against the frame at the extracted
/// parameters (modulation extraction with the supplied guess).
std::vector<cd> unstable_coefficient(const ComplexField& psi,
                                     const MultiSolitonConfig& sigma_guess,
                                     const ExtractOptions& opt = {});

/// Root-find h such that b_+(T) = 0 along the nonlinear flow, via horizon
/// continuation T0, T0+step, ..., T, then a T+1, T+2 ladder check. Throws
/// ShootingFailure when a stage cannot reduce the residual.
ShotResult shoot(const ShotSpec& spec);

enum class SideBehavior { blowup, dispersal, undecided };

struct DichotomyReport {
    SideBehavior plus = SideBehavior::undecided;
    SideBehavior minus = SideBehavior::undecided;
    double t_plus = 0.0;  // classification time
    double t_minus = 0.0;
};

/// Evolve h = h* +- offset * direction and classify the two sides of the
/// center-stable manifold. An empty direction means the real axis of the
/// first soliton; pass ShotResult::sensitive_direction so the offset is not
/// tangent to the root line when the sensitivity matrix is rank-deficient.
DichotomyReport classify_dichotomy(const ShotSpec& spec,
                                   const std::vector<cd>& h_star, double offset,
                                   const std::vector<cd>& direction = {},
                                   double t_max = 25.0);

struct ManifoldPoint {
    double s = 0.0;
    std::vector<cd> h_star;
    double h_norm = 0.0;  // max_l |h*_l(s) - h*_l(0)|, distance to the baseline
};

struct ManifoldScan {
    std::vector<ManifoldPoint> points;
    double max_lipschitz = 0.0;  // max quotient of baseline-relative norms
    double fit_exponent = 0.0;   // slope of log h_norm vs log s (target ~ 2)
};

/// shoot() for r0 scaled by each s in the grid. The s = 0 baseline is also
/// shot: the discretization itself seeds unstable content (~ dt^2), so the
/// quadratic manifold law holds for h*(s) - h*(0), not for raw h*.
ManifoldScan manifold_scan(const ShotSpec& base, const std::vector<double>& scales);

} // namespace nlslab
