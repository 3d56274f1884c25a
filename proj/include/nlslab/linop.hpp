#pragma once

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/solitons.hpp"

#include <array>
#include <vector>

namespace nlslab {

/// The 2x2 matrix operator governing perturbations of a single soliton in the
/// (u, conj u) formulation, assembled in its own frame (center 0, v = 0):
///
///   H = [ -d2 + a^2 - (k+1) phi^{2k}     -k phi^{2k}              ]
///       [  k phi^{2k}                     d2 - a^2 + (k+1) phi^{2k} ]
class LinearizedOperator {
public:
    LinearizedOperator(double alpha, double k, GridPtr grid);

    double alpha() const { return alpha_; }
    double k() const { return k_; }
    const GridPtr& grid() const { return grid_; }
    /// (k+1) phi^{2k}
    const std::vector<double>& pot_a() const { return pot_a_; }
    /// k phi^{2k}
    const std::vector<double>& pot_b() const { return pot_b_; }

private:
    double alpha_;
    double k_;
    GridPtr grid_;
    std::vector<double> pot_a_;
    std::vector<double> pot_b_;
};

LinearizedOperator assemble_H(double alpha, double k, const GridPtr& grid);

/// Matrix-free application via spectral d2 + pointwise potentials.
VectorField apply_H(const LinearizedOperator& op, const VectorField& f);

/// Root-space basis of ker H^2: (phi', phi'), (i phi, -i phi),
/// (i x phi, -i x phi), (d_alpha phi, d_alpha phi), each unit L^2.
std::array<VectorField, 4> root_basis(double alpha, double k, const GridPtr& grid);

struct SpectralData {
    double alpha = 0.0;
    double k = 0.0;
    double lambda0 = 0.0;            // H Z+ = i lambda0 Z+, lambda0 > 0
    VectorField Z_plus;              // unit L^2, conjugate-pair gauge
    VectorField Z_minus;             // component-wise conjugate of Z_plus
    std::array<VectorField, 4> root; // normalized ker H^2 basis
    double eigen_residual = 0.0;     // ||H Z+ - i lambda0 Z+||_2
    std::array<double, 4> root_residuals{}; // ||H^2 w||_2 per unit vector
};

/// Dense 2N x 2N materialization (row-major, real: H has real entries in the
/// operator frame) with the spectral d2 block.
std::vector<double> dense_matrix(const LinearizedOperator& op);

/// Dense real 2N x 2N eigenvalue list (LAPACK dgeev). Intended for modest N;
/// throws std::invalid_argument when 2N > 8192.
std::vector<cd> dense_eigenvalues(const LinearizedOperator& op);

/// lambda0 and eigenvectors via the scalar reduction: with u = z1 + z2 and
/// w = z1 - z2, the eigenproblem H z = i lambda0 z collapses to the real
/// problem (Lm Lp) u = -lambda0^2 u with
///   Lp = -d2 + a^2 - (2k+1) phi^{2k},  Lm = -d2 + a^2 - phi^{2k};
/// solved by coarse-grid dense eigensolve + fine-grid inverse iteration.
/// search_radius > 0 restricts acceptable lambda0.
SpectralData discrete_spectrum(const LinearizedOperator& op,
                               double search_radius = 0.0);

/// Cached discrete_spectrum keyed by (alpha, k, grid instance).
const SpectralData& spectral_data(double alpha, double k, const GridPtr& grid);

enum class GrowthSeed {
    random_localized, // fit the unstable coefficient of a random packet
    stable_mode,      // seed Z-, fit its (decaying) coefficient
    root_mode         // seed a root vector, fit ||u(t)||
};

/// Evolves the single-soliton linearization (charge-transfer flow with m = 1,
/// v = y = gamma = 0) and fits the exponential rate of the selected
/// observable over t in [fit_start, t_max]. Independent cross-check of
/// lambda0: the unstable coefficient grows at rate +lambda0.
double growth_rate_from_evolution(const LinearizedOperator& op,
                                  const SpectralData& sd, double t_max,
                                  GrowthSeed seed_kind = GrowthSeed::random_localized,
                                  unsigned rng_seed = 1234, double dt = 1e-3,
                                  double fit_start = 0.5);

} // namespace nlslab
