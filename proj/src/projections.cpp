#include "nlslab/projections.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace nlslab {

DiscreteFrame build_frame(const MultiSolitonConfig& cfg, double t,
                          const GridPtr& grid, double cond_bound) {
    cfg.validate();
    DiscreteFrame frame;
    frame.cfg = cfg;
    frame.t = t;
    frame.vectors.reserve(static_cast<size_t>(DiscreteFrame::kPerSoliton) *
                          cfg.solitons.size());
    for (const auto& p : cfg.solitons) {
        const SpectralData& sd = spectral_data(p.alpha, cfg.k, grid);
        frame.vectors.push_back(galilean_lift(sd.Z_plus, p, t));
        frame.vectors.push_back(galilean_lift(sd.Z_minus, p, t));
        for (const auto& w : sd.root)
            frame.vectors.push_back(galilean_lift(w, p, t));
    }

    // Gram system of the sigma_z pairing: M_{ki} = <e_i, sigma_z e_k>.
    const int n = static_cast<int>(frame.vectors.size());
    Eigen::MatrixXcd M(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            M(k, i) = symplectic_product(frame.vectors[i], frame.vectors[k]);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU |
                                                  Eigen::ComputeThinV);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    frame.gram_condition = smin > 0.0 ? smax / smin : 1.0 / 0.0;
    if (!(frame.gram_condition < cond_bound)) {
        // name the closest soliton pair at this time
        int a = 0, b = 0;
        double best = 1.0 / 0.0;
        for (int i = 0; i < cfg.m(); ++i)
            for (int j = i + 1; j < cfg.m(); ++j) {
                const double d =
                    std::abs((cfg.solitons[i].y + cfg.solitons[i].v * t) -
                             (cfg.solitons[j].y + cfg.solitons[j].v * t));
                if (d < best) { best = d; a = i; b = j; }
            }
        std::string msg = "frame Gram condition " +
                          std::to_string(frame.gram_condition) + " at t = " +
                          std::to_string(t);
        if (cfg.m() > 1)
            msg += "; closest solitons " + std::to_string(a) + " and " +
                   std::to_string(b) + " (gap " + std::to_string(best) + ")";
        throw FrameDegeneracy(msg);
    }

    // dual frame f_j = sum_i (M^{-1})_{ij} e_i (M is Hermitian, so this gives
    // <e_i, sigma_z f_j> = delta_ij)
    Eigen::MatrixXcd Minv = M.inverse();
    frame.dual.reserve(n);
    for (int j = 0; j < n; ++j) {
        VectorField f(grid);
        for (int i = 0; i < n; ++i) f += Minv(i, j) * frame.vectors[i];
        frame.dual.push_back(std::move(f));
    }
    return frame;
}

Decomposition decompose(const VectorField& u, const DiscreteFrame& frame) {
    Decomposition d;
    d.continuous = u;
    d.coefficients.resize(frame.vectors.size());
    for (size_t j = 0; j < frame.vectors.size(); ++j) {
        d.coefficients[j] = symplectic_product(u, frame.dual[j]);
        d.continuous -= d.coefficients[j] * frame.vectors[j];
    }
    return d;
}

VectorField project(const VectorField& u, const DiscreteFrame& frame,
                    Component which) {
    Decomposition d = decompose(u, frame);
    if (which == Component::continuous) return d.continuous;
    VectorField out(u.grid());
    for (size_t j = 0; j < frame.vectors.size(); ++j)
        if (frame.component_of(static_cast<int>(j)) == which)
            out += d.coefficients[j] * frame.vectors[j];
    return out;
}

} // namespace nlslab
