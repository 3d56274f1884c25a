#include "nlslab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace nlslab {

namespace {
// FFTW plan creation is not thread-safe; execution via the new-array
// interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Grid::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

GridPtr Grid::make(double half_length, int n_points) {
    if (half_length <= 0.0)
        throw std::invalid_argument("Grid: half_length must be positive");
    if (n_points < 8 || n_points % 2 != 0)
        throw std::invalid_argument("Grid: n_points must be even and >= 8");
    return GridPtr(new Grid(half_length, n_points));
}

Grid::Grid(double half_length, int n_points)
    : half_length_(half_length),
      n_(n_points),
      spacing_(2.0 * half_length / n_points),
      nodes_(n_points),
      xi_(n_points),
      plans_(std::make_unique<Plans>()) {
    for (int j = 0; j < n_; ++j) nodes_[j] = -half_length_ + j * spacing_;
    const double dxi = std::numbers::pi / half_length_;
    for (int j = 0; j < n_; ++j) {
        int k = (j <= n_ / 2 - 1) ? j : j - n_;
        if (j == n_ / 2) k = -n_ / 2;
        xi_[j] = dxi * k;
    }
    std::vector<cd> scratch(n_);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->forward = fftw_plan_dft_1d(n_, buf, buf, FFTW_FORWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->backward = fftw_plan_dft_1d(n_, buf, buf, FFTW_BACKWARD,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Grid::~Grid() = default;

void Grid::fft(cd* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->forward, buf, buf);
}

void Grid::ifft(cd* data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plans_->backward, buf, buf);
    const double s = 1.0 / n_;
    for (int j = 0; j < n_; ++j) data[j] *= s;
}

ComplexField::ComplexField(GridPtr grid, std::vector<cd> values)
    : grid_(std::move(grid)), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != grid_->n())
        throw std::invalid_argument("ComplexField: value count != grid size");
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
    if (!same_grid(grid_, o.grid_)) throw std::invalid_argument("grid mismatch");
    for (int j = 0; j < size(); ++j) v_[j] += o.v_[j];
    return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
    if (!same_grid(grid_, o.grid_)) throw std::invalid_argument("grid mismatch");
    for (int j = 0; j < size(); ++j) v_[j] -= o.v_[j];
    return *this;
}

ComplexField& ComplexField::operator*=(cd s) {
    for (auto& z : v_) z *= s;
    return *this;
}

bool ComplexField::finite() const {
    return std::all_of(v_.begin(), v_.end(), [](cd z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cd s, ComplexField a) { return a *= s; }

ComplexField conj(const ComplexField& f) {
    ComplexField out(f.grid());
    for (int j = 0; j < f.size(); ++j) out[j] = std::conj(f[j]);
    return out;
}

VectorField::VectorField(ComplexField f, ComplexField s)
    : first(std::move(f)), second(std::move(s)) {
    if (!same_grid(first.grid(), second.grid()))
        throw std::invalid_argument("VectorField: components on different grids");
}

VectorField& VectorField::operator+=(const VectorField& o) {
    first += o.first;
    second += o.second;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    first -= o.first;
    second -= o.second;
    return *this;
}

VectorField& VectorField::operator*=(cd s) {
    first *= s;
    second *= s;
    return *this;
}

double VectorField::conjugate_pair_defect() const {
    double d = 0.0;
    for (int j = 0; j < first.size(); ++j)
        d = std::max(d, std::abs(second[j] - std::conj(first[j])));
    return d;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(cd s, VectorField a) { return a *= s; }

VectorField as_pair(const ComplexField& f) { return VectorField(f, conj(f)); }

double quadrature_weight(const Grid& g) { return g.spacing(); }

cd inner_product(const ComplexField& f, const ComplexField& g) {
    if (!same_grid(f.grid(), g.grid())) throw std::invalid_argument("grid mismatch");
    cd acc(0.0, 0.0);
    for (int j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
    return acc * f.grid()->spacing();
}

cd inner_product(const VectorField& f, const VectorField& g) {
    return inner_product(f.first, g.first) + inner_product(f.second, g.second);
}

cd symplectic_product(const VectorField& f, const VectorField& g) {
    return inner_product(f.first, g.first) - inner_product(f.second, g.second);
}

double l2_norm(const ComplexField& f) {
    double acc = 0.0;
    for (int j = 0; j < f.size(); ++j) acc += std::norm(f[j]);
    return std::sqrt(acc * f.grid()->spacing());
}

double l2_norm(const VectorField& f) {
    double a = l2_norm(f.first), b = l2_norm(f.second);
    return std::sqrt(a * a + b * b);
}

double linf_norm(const ComplexField& f) {
    double m = 0.0;
    for (int j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j]));
    return m;
}

double linf_norm(const VectorField& f) {
    return std::max(linf_norm(f.first), linf_norm(f.second));
}

double l1_norm(const ComplexField& f) {
    double acc = 0.0;
    for (int j = 0; j < f.size(); ++j) acc += std::abs(f[j]);
    return acc * f.grid()->spacing();
}

namespace {
template <class Norm2At>
double weighted_norm_impl(const Grid& g, double center, double exponent,
                          std::optional<std::pair<double, double>> window,
                          Norm2At norm2_at) {
    double acc = 0.0;
    for (int j = 0; j < g.n(); ++j) {
        const double x = g.node(j);
        if (window && (x < window->first || x > window->second)) continue;
        const double d = x - center;
        const double w = std::pow(1.0 + d * d, -exponent / 2.0);
        acc += w * w * norm2_at(j);
    }
    return std::sqrt(acc * g.spacing());
}
} // namespace

double weighted_norm(const VectorField& f, double center, double exponent,
                     std::optional<std::pair<double, double>> window) {
    return weighted_norm_impl(*f.grid(), center, exponent, window, [&](int j) {
        return std::norm(f.first[j]) + std::norm(f.second[j]);
    });
}

double weighted_norm(const ComplexField& f, double center, double exponent,
                     std::optional<std::pair<double, double>> window) {
    return weighted_norm_impl(*f.grid(), center, exponent, window,
                              [&](int j) { return std::norm(f[j]); });
}

ComplexField spectral_derivative(const ComplexField& f, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
    const Grid& g = *f.grid();
    ComplexField out = f;
    g.fft(out.values().data());
    for (int j = 0; j < g.n(); ++j) {
        const cd ixi(0.0, g.wavenumber(j));
        out[j] *= (order == 1) ? ixi : ixi * ixi;
    }
    g.ifft(out.values().data());
    return out;
}

ComplexField translate(const ComplexField& f, double shift) {
    const Grid& g = *f.grid();
    ComplexField out = f;
    g.fft(out.values().data());
    for (int j = 0; j < g.n(); ++j) {
        const double xi = g.wavenumber(j);
        out[j] *= std::polar(1.0, -xi * shift);
    }
    g.ifft(out.values().data());
    return out;
}

ComplexField low_pass(const ComplexField& f, double fraction) {
    const Grid& g = *f.grid();
    ComplexField out = f;
    g.fft(out.values().data());
    const double cut = fraction * std::abs(g.wavenumber(g.n() / 2));
    for (int j = 0; j < g.n(); ++j)
        if (std::abs(g.wavenumber(j)) > cut) out[j] = 0.0;
    g.ifft(out.values().data());
    return out;
}

double l2_norm_fourier(const ComplexField& f) {
    const Grid& g = *f.grid();
    ComplexField hat = f;
    g.fft(hat.values().data());
    double acc = 0.0;
    for (int j = 0; j < g.n(); ++j) acc += std::norm(hat[j]);
    // Parseval for the unnormalized DFT with rectangle quadrature.
    return std::sqrt(acc * g.spacing() / g.n());
}

double smooth_step(double x, double center, double width) {
    const double s = (x - (center - width / 2.0)) / width;
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

std::vector<double> sponge_profile(const Grid& g, double width, double strength) {
    if (width >= g.half_length() / 2.0)
        throw std::invalid_argument("sponge_profile: width must be < L/2");
    std::vector<double> out(g.n(), 0.0);
    if (strength == 0.0) return out;
    const double L = g.half_length();
    for (int j = 0; j < g.n(); ++j) {
        const double d = L - std::abs(g.node(j)); // distance to nearer edge
        if (d < width) {
            const double s = 1.0 - d / width; // 0 at inner boundary, 1 at edge
            out[j] = strength * smooth_step(s, 0.5, 1.0);
        }
    }
    return out;
}

} // namespace nlslab
