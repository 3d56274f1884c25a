#pragma once

#include "nlslab/errors.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/solitons.hpp"

#include <vector>

namespace nlslab {

enum class Component { unstable, stable, root, continuous };

/// Snapshot of the discrete (hyperbolic + root) frame at one time: per soliton
/// the Galilean-lifted Z+, Z-, and the 4 root vectors, plus the biorthogonal
/// dual frame solved from the sigma_z-pairing Gram system. Immutable once
/// built; frames for different times may be built concurrently.
struct DiscreteFrame {
    static constexpr int kPerSoliton = 6; // Z+, Z-, root 0..3

    MultiSolitonConfig cfg;
    double t = 0.0;
    std::vector<VectorField> vectors;
    std::vector<VectorField> dual; // <e_i, sigma_z f_j> = delta_ij
    double gram_condition = 0.0;

    int m() const { return static_cast<int>(vectors.size()) / kPerSoliton; }
    Component component_of(int index) const {
        switch (index % kPerSoliton) {
            case 0: return Component::unstable;
            case 1: return Component::stable;
            default: return Component::root;
        }
    }
};

/// Builds the lifted frame at time t. Throws FrameDegeneracy (naming the
/// closest soliton pair) when the Gram condition number exceeds cond_bound.
DiscreteFrame build_frame(const MultiSolitonConfig& cfg, double t,
                          const GridPtr& grid, double cond_bound = 1e6);

struct Decomposition {
    std::vector<cd> coefficients; // aligned with frame.vectors
    VectorField continuous;       // u minus the discrete part
};

/// Unique representation u = u_c + sum c_i e_i with <u_c, sigma_z e_i> = 0.
Decomposition decompose(const VectorField& u, const DiscreteFrame& frame);

/// The named spectral component of u. Idempotent; the four components sum to u.
VectorField project(const VectorField& u, const DiscreteFrame& frame,
                    Component which);

} // namespace nlslab
