#pragma once

#include "nlslab/grid.hpp"
#include "nlslab/solitons.hpp"

#include <vector>

namespace nlslab {

struct DecayFit {
    double t0 = 0.0, t1 = 0.0;
    double exponent = 0.0;   // slope of log(value) vs log(1+t)
    double intercept = 0.0;
    double r_squared = 0.0;
    double max_residual = 0.0; // worst |log value - fit| in the window
    int n_samples = 0;
};

/// Least squares of log(value) on log(1+t) over the window [t0, t1].
/// Requires >= 10 in-window samples with positive values.
DecayFit fit_decay_exponent(const std::vector<double>& times,
                            const std::vector<double>& values, double t0,
                            double t1);

struct InteractionPoint {
    double separation = 0.0;
    double l1 = 0.0, l2 = 0.0;                    // plain norms
    double l1_weighted = 0.0, l2_weighted = 0.0;  // max_j <x-y_j>^2-weighted
    bool dropped = false;                          // tail underflow
};

struct InteractionScan {
    std::vector<InteractionPoint> points;
    // fitted rates r of norm ~ e^{-r L} (over non-dropped points)
    double rate_l1 = 0.0, rate_l2 = 0.0;
    double rate_l1_weighted = 0.0, rate_l2_weighted = 0.0;
};

/// Nonlinear interaction size of a two-soliton superposition at separation L:
/// norms of F(q1 + q2) - F(q1) - F(q2) with F(z) = |z|^{2k} z, plus the
/// weighted versions, and exponential rate fits in L.
InteractionScan interaction_scan(double k, double alpha,
                                 const std::vector<double>& separations,
                                 const GridPtr& grid);

struct BoundCheckPoint {
    double arg = 0.0;      // zeta or t
    double integral = 0.0; // quadrature value
    double envelope = 0.0; // stated majorant / asymptotic envelope
    double ratio = 0.0;    // integral / envelope
};

struct BoundCheckReport {
    std::vector<BoundCheckPoint> points;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
};

/// integral_R |x|^m e^{-alpha x_+} e^{-beta (zeta - x)_+} dx against the
/// envelope max((1+zeta^m) e^{-alpha zeta}, e^{-beta zeta}), or
/// (1+zeta^{m+1}) e^{-alpha zeta} when alpha == beta.
BoundCheckReport verify_interactt(double alpha, double beta, double m_exp,
                                  const std::vector<double>& zetas);

/// integral_0^t (1+t-s)^{-a} (1+s)^{-b} ds against the three-branch
/// asymptotic envelope (power-law, with log corrections at a == 1 or b == 1).
BoundCheckReport verify_interpol(double a_exp, double b_exp,
                                 const std::vector<double>& ts);

struct ConservedQuantities {
    double mass = 0.0;      // integral |psi|^2
    double energy = 0.0;    // integral (|psi_x|^2 - |psi|^{2k+2}/(k+1))
    double momentum = 0.0;  // Im integral conj(psi) psi_x
};

ConservedQuantities conserved_quantities(const ComplexField& psi, double k);

} // namespace nlslab
