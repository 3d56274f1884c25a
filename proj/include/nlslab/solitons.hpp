#pragma once

#include "nlslab/grid.hpp"

#include <vector>

namespace nlslab {

/// Modulation vector of one soliton: velocity, center, scale, phase.
struct SolitonParams {
    double v = 0.0;
    double y = 0.0;
    double alpha = 1.0;
    double gamma = 0.0;
};

/// Ordered family of solitons (y and v strictly decreasing) plus the
/// nonlinearity exponent k.
struct MultiSolitonConfig {
    double k = 3.0;
    std::vector<SolitonParams> solitons;

    int m() const { return static_cast<int>(solitons.size()); }
    void validate() const; // throws on violated ordering/positivity
};

/// Traveling-wave phase v x/2 - v^2 t/4 + alpha^2 t + gamma.
double soliton_phase(const SolitonParams& p, double t, double x);

/// Closed-form ground state phi_alpha(x) = alpha^{1/k}(k+1)^{1/2k} sech^{1/k}(k alpha x).
double ground_state_value(double alpha, double k, double x);

struct GroundStateResult {
    ComplexField phi;
    double edge_value = 0.0; // max |phi| at the box boundary
    bool truncated = false;  // edge_value above the decay requirement
};

GroundStateResult ground_state(double alpha, double k, const GridPtr& grid);

/// phi and the parameter derivatives entering the generalized-kernel basis.
struct GroundStateFamily {
    ComplexField phi;
    ComplexField dphi_dx;     // closed form: -alpha tanh(k alpha x) phi
    ComplexField dphi_dalpha; // (phi/k + x phi') / alpha
    ComplexField x_phi;
    ComplexField x_dphi_dx;
    bool truncated = false;
};

GroundStateFamily ground_state_family(double alpha, double k, const GridPtr& grid);

/// Exact solitary wave at time t.
ComplexField solitary_wave(const SolitonParams& p, double k, double t,
                           const GridPtr& grid);

/// Superposition Q_sigma(t).
ComplexField multi_soliton(const MultiSolitonConfig& cfg, double t,
                           const GridPtr& grid);

/// Component-wise phase e^{+-i theta} and Fourier translation by y + v t,
/// with theta = v x/2 - v^2 t/4 + alpha^2 t + gamma.
VectorField galilean_lift(const VectorField& f, const SolitonParams& p, double t);

/// Smooth partition-of-unity cutoff adapted to the linear trajectories:
/// soliton ell's window between the midpoints toward its neighbours.
/// width_fraction is the transition width as a fraction of the local gap.
std::vector<double> cutoff_chi(const GridPtr& grid, const MultiSolitonConfig& cfg,
                               int ell, double t, double width_fraction = 0.1);

/// Well-separation report: margins of (H1)/(H2) and the delta_0 scale.
struct HypothesesReport {
    double min_velocity_gap = 0.0; // +inf for m = 1
    double min_center_gap = 0.0;
    bool h1_velocity_ok = false;   // against the supplied threshold
    bool h1_center_ok = false;
    bool h2_ok = false;            // exponential comparability of gaps
    double h2_margin = 0.0;        // e^{min alpha * min gap / 600} - max gap
    double delta0 = 0.0;           // N e^{-(4/10) min alpha * min gap}
    double n_constant = 0.0;       // the N actually used
};

HypothesesReport check_hypotheses(const MultiSolitonConfig& cfg,
                                  double velocity_threshold = 1.0,
                                  double center_threshold = 10.0,
                                  double n_constant = 0.0 /* 0 = auto */);

} // namespace nlslab
