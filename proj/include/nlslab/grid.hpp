#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nlslab {

using cd = std::complex<double>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on [-L, L) with 2*pi-periodic spectral wavenumbers.
/// FFT plans are created once per grid and shared by all fields living on it.
class Grid {
public:
    static GridPtr make(double half_length, int n_points);
    ~Grid();

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    double half_length() const { return half_length_; }
    int n() const { return n_; }
    double spacing() const { return spacing_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& wavenumbers() const { return xi_; }
    double node(int j) const { return nodes_[j]; }
    double wavenumber(int j) const { return xi_[j]; }

    /// In-place forward transform, unnormalized (sum convention).
    void fft(cd* data) const;
    /// In-place inverse transform, normalized by 1/N.
    void ifft(cd* data) const;

private:
    Grid(double half_length, int n_points);

    double half_length_;
    int n_;
    double spacing_;
    std::vector<double> nodes_;
    std::vector<double> xi_;

    struct Plans;
    std::unique_ptr<Plans> plans_;
};

inline bool same_grid(const GridPtr& a, const GridPtr& b) { return a.get() == b.get(); }

/// Complex-valued function sampled at the grid nodes.
class ComplexField {
public:
    ComplexField() = default;
    explicit ComplexField(GridPtr grid, cd fill = cd(0.0, 0.0))
        : grid_(std::move(grid)), v_(grid_->n(), fill) {}
    ComplexField(GridPtr grid, std::vector<cd> values);

    const GridPtr& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    const std::vector<cd>& values() const { return v_; }
    std::vector<cd>& values() { return v_; }
    cd operator[](int j) const { return v_[j]; }
    cd& operator[](int j) { return v_[j]; }

    ComplexField& operator+=(const ComplexField& o);
    ComplexField& operator-=(const ComplexField& o);
    ComplexField& operator*=(cd s);

    bool finite() const;

private:
    GridPtr grid_;
    std::vector<cd> v_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cd s, ComplexField a);
ComplexField conj(const ComplexField& f);

/// Two-component state (u, u2). For physical states u2 = conj(u); eigenfunctions
/// of the linearized operator generally break that symmetry.
struct VectorField {
    ComplexField first;
    ComplexField second;

    VectorField() = default;
    VectorField(ComplexField f, ComplexField s);
    explicit VectorField(GridPtr grid) : first(grid), second(std::move(grid)) {}

    const GridPtr& grid() const { return first.grid(); }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(cd s);

    /// Max deviation from the conjugate-pair constraint second = conj(first).
    double conjugate_pair_defect() const;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(cd s, VectorField a);

/// Physical lift psi -> (psi, conj(psi)).
VectorField as_pair(const ComplexField& f);

// --- quadrature and inner products (rectangle rule, spectrally accurate) ---

double quadrature_weight(const Grid& g);

/// <f, g> = integral f * conj(g)
cd inner_product(const ComplexField& f, const ComplexField& g);
/// <f, g> = integral (f1 conj(g1) + f2 conj(g2))
cd inner_product(const VectorField& f, const VectorField& g);
/// <f, sigma_z g> = integral (f1 conj(g1) - f2 conj(g2))
cd symplectic_product(const VectorField& f, const VectorField& g);

double l2_norm(const ComplexField& f);
double l2_norm(const VectorField& f);
double linf_norm(const ComplexField& f);
double linf_norm(const VectorField& f);
double l1_norm(const ComplexField& f);

/// L2 norm of <x-center>^{-exponent} * f restricted to the window.
double weighted_norm(const VectorField& f, double center, double exponent,
                     std::optional<std::pair<double, double>> window = std::nullopt);
double weighted_norm(const ComplexField& f, double center, double exponent,
                     std::optional<std::pair<double, double>> window = std::nullopt);

// --- spectral operations ---

/// Fourier multiplier (i xi)^order; order in {1, 2}.
ComplexField spectral_derivative(const ComplexField& f, int order);

/// f(x - shift) via Fourier phase shift (shift need not be grid-aligned).
ComplexField translate(const ComplexField& f, double shift);

/// Zero all modes with |xi| > fraction * xi_max (2/3 de-aliasing by default).
ComplexField low_pass(const ComplexField& f, double fraction = 2.0 / 3.0);

/// Parseval L2 norm computed in Fourier space (cross-check path).
double l2_norm_fourier(const ComplexField& f);

// --- profiles ---

/// Smooth step: 0 for x <= center - width/2, 1 for x >= center + width/2.
double smooth_step(double x, double center, double width);

/// Nonnegative damping profile supported within `width` of the box edges.
std::vector<double> sponge_profile(const Grid& g, double width, double strength);

} // namespace nlslab
