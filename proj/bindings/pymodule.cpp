// Python face of the library: field construction, spectra, evolution,
// modulation extraction, and the shooting loop, all on numpy arrays.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlslab/diagnostics.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/linop.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/shooting.hpp"
#include "nlslab/solitons.hpp"

#include <map>
#include <vector>

namespace py = pybind11;
using namespace nlslab;

namespace {

const GridPtr& grid_of(double L, int N) {
    static std::map<std::pair<double, int>, GridPtr> cache;
    GridPtr& g = cache[{L, N}];
    if (!g) g = Grid::make(L, N);
    return g;
}

ComplexField to_field(const py::array_t<cd>& a, double L) {
    const auto buf = a.request();
    if (buf.ndim != 1) throw std::invalid_argument("expected a 1-d array");
    const int n = static_cast<int>(buf.shape[0]);
    ComplexField f(grid_of(L, n));
    const cd* src = static_cast<const cd*>(buf.ptr);
    std::copy(src, src + n, f.values().begin());
    return f;
}

py::array_t<cd> to_array(const ComplexField& f) {
    py::array_t<cd> out(f.size());
    std::copy(f.values().begin(), f.values().end(),
              static_cast<cd*>(out.request().ptr));
    return out;
}

MultiSolitonConfig to_config(double k,
                             const std::vector<std::array<double, 4>>& sol) {
    MultiSolitonConfig cfg;
    cfg.k = k;
    for (const auto& s : sol)
        cfg.solitons.push_back(SolitonParams{s[0], s[1], s[2], s[3]});
    cfg.validate();
    return cfg;
}

std::vector<std::array<double, 4>> from_config(const MultiSolitonConfig& cfg) {
    std::vector<std::array<double, 4>> out;
    for (const SolitonParams& p : cfg.solitons)
        out.push_back({p.v, p.y, p.alpha, p.gamma});
    return out;
}

} // namespace

PYBIND11_MODULE(pynlslab, m) {
    m.doc() = "1D focusing NLS multi-soliton toolbox";

    m.def("grid_nodes", [](double L, int N) {
        const GridPtr& g = grid_of(L, N);
        py::array_t<double> out(N);
        std::copy(g->nodes().begin(), g->nodes().end(),
                  static_cast<double*>(out.request().ptr));
        return out;
    }, py::arg("L"), py::arg("N"));

    m.def("ground_state", [](double alpha, double k, double L, int N) {
        return to_array(nlslab::ground_state(alpha, k, grid_of(L, N)).phi);
    }, py::arg("alpha"), py::arg("k"), py::arg("L"), py::arg("N"));

    m.def("multi_soliton",
          [](double k, const std::vector<std::array<double, 4>>& solitons,
             double t, double L, int N) {
              return to_array(
                  nlslab::multi_soliton(to_config(k, solitons), t, grid_of(L, N)));
          },
          py::arg("k"), py::arg("solitons"), py::arg("t"), py::arg("L"),
          py::arg("N"),
          "Superposition of solitary waves; each soliton is (v, y, alpha, gamma)");

    m.def("free_propagator", [](const py::array_t<cd>& psi, double L, double t) {
        return to_array(nlslab::free_propagator(to_field(psi, L), t));
    }, py::arg("psi"), py::arg("L"), py::arg("t"));

    m.def("spectrum", [](double alpha, double k, double L, int N) {
        const SpectralData& sd = spectral_data(alpha, k, grid_of(L, N));
        py::dict out;
        out["lambda0"] = sd.lambda0;
        out["eigen_residual"] = sd.eigen_residual;
        out["z_plus"] = py::make_tuple(to_array(sd.Z_plus.first),
                                       to_array(sd.Z_plus.second));
        return out;
    }, py::arg("alpha"), py::arg("k"), py::arg("L"), py::arg("N"));

    m.def("conserved", [](const py::array_t<cd>& psi, double L, double k) {
        ConservedQuantities q = conserved_quantities(to_field(psi, L), k);
        return py::make_tuple(q.mass, q.energy, q.momentum);
    }, py::arg("psi"), py::arg("L"), py::arg("k"),
       "(mass, energy, momentum)");

    m.def("evolve",
          [](const py::array_t<cd>& psi, double L, double k, double dt,
             double t_end, bool sponge, int diag_stride) {
              IntegratorConfig cfg;
              cfg.dt = dt;
              cfg.t_end = t_end;
              cfg.k = k;
              cfg.diag_stride = diag_stride;
              cfg.sponge.enabled = sponge;
              ComplexField last;
              TrajectoryRecord rec = evolve_nls(
                  to_field(psi, L), cfg,
                  [&](double, const ComplexField& f) { last = f; });
              py::dict out;
              out["times"] = rec.times;
              out["mass"] = rec.mass;
              out["energy"] = rec.energy;
              out["linf"] = rec.linf;
              out["psi"] = to_array(last);
              return out;
          },
          py::arg("psi"), py::arg("L"), py::arg("k"), py::arg("dt"),
          py::arg("t_end"), py::arg("sponge") = false,
          py::arg("diag_stride") = 10);

    m.def("extract",
          [](const py::array_t<cd>& psi, double L, double k,
             const std::vector<std::array<double, 4>>& guess) {
              ModulationState st =
                  extract_parameters(to_field(psi, L), to_config(k, guess));
              py::dict out;
              out["solitons"] = from_config(st.sigma);
              out["radiation"] = to_array(st.radiation);
              out["max_residual"] = st.max_residual();
              out["iterations"] = st.iterations;
              return out;
          },
          py::arg("psi"), py::arg("L"), py::arg("k"), py::arg("guess"),
          "Modulation parameters with the radiation orthogonal to the root frame");

    m.def("unstable_coefficient",
          [](const py::array_t<cd>& psi, double L, double k,
             const std::vector<std::array<double, 4>>& guess) {
              return nlslab::unstable_coefficient(to_field(psi, L),
                                                  to_config(k, guess));
          },
          py::arg("psi"), py::arg("L"), py::arg("k"), py::arg("guess"));

    m.def("shoot",
          [](double k, const std::vector<std::array<double, 4>>& solitons,
             const py::array_t<cd>& r0, double L, double T, double tol,
             double dt, int ladder_steps) {
              ShotSpec spec;
              spec.sigma0 = to_config(k, solitons);
              ComplexField r = to_field(r0, L);
              spec.grid = r.grid();
              spec.r0 = r;
              spec.T = T;
              spec.tol = tol;
              spec.dt = dt;
              spec.ladder_steps = ladder_steps;
              ShotResult res = nlslab::shoot(spec);
              py::dict out;
              out["h_star"] = res.h_star;
              out["b_terminal"] = res.b_terminal;
              out["psi0"] = to_array(res.psi0);
              out["iterations"] = res.history.size();
              out["sensitivity_rank"] = res.sensitivity_rank;
              return out;
          },
          py::arg("k"), py::arg("solitons"), py::arg("r0"), py::arg("L"),
          py::arg("T"), py::arg("tol") = 1e-8, py::arg("dt") = 1e-3,
          py::arg("ladder_steps") = 0,
          "Root-find the unstable coefficients so b_+(T) = 0");

    py::register_exception<NumericalError>(m, "NumericalError");
}
