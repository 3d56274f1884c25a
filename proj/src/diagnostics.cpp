#include "nlslab/diagnostics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nlslab {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0, max_res = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double det = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ymean) * (y[i] - ymean);
        f.max_res = std::max(f.max_res, std::abs(r));
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace

DecayFit fit_decay_exponent(const std::vector<double>& times,
                            const std::vector<double>& values, double t0,
                            double t1) {
    if (times.size() != values.size())
        throw std::invalid_argument("fit_decay_exponent: size mismatch");
    if (!(t1 > t0) || t0 < 0.0)
        throw std::invalid_argument("fit_decay_exponent: need t1 > t0 >= 0");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t0 || times[i] > t1) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument(
                "fit_decay_exponent: nonpositive value in window");
        lx.push_back(std::log1p(times[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 10)
        throw std::invalid_argument("fit_decay_exponent: < 10 samples in window");
    LineFit f = least_squares(lx, ly);
    DecayFit out;
    out.t0 = t0;
    out.t1 = t1;
    out.exponent = f.slope;
    out.intercept = f.intercept;
    out.r_squared = f.r2;
    out.max_residual = f.max_res;
    out.n_samples = static_cast<int>(lx.size());
    return out;
}

InteractionScan interaction_scan(double k, double alpha,
                                 const std::vector<double>& separations,
                                 const GridPtr& grid) {
    const int n = grid->n();
    const bool integer_k = std::abs(k - std::llround(k)) < 1e-12;
    const int ki = static_cast<int>(std::llround(k));

    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
        return r;
    };

    InteractionScan scan;
    for (double L : separations) {
        InteractionPoint pt;
        pt.separation = L;
        const double y1 = L / 2.0, y2 = -L / 2.0;
        SolitonParams p1{0.5, y1, alpha, 0.0};
        SolitonParams p2{-0.5, y2, alpha, 0.3};

        double l1 = 0, l2 = 0, l1w[2] = {0, 0}, l2w[2] = {0, 0};
        for (int j = 0; j < n; ++j) {
            const double x = grid->node(j);
            const cd q1 = std::polar(ground_state_value(alpha, k, x - y1),
                                     p1.v * x / 2.0 + p1.gamma);
            const cd q2 = std::polar(ground_state_value(alpha, k, x - y2),
                                     p2.v * x / 2.0 + p2.gamma);
            cd diff;
            if (integer_k) {
                // multinomial cross terms of (q1+q2)^{k+1} conj(q1+q2)^k minus
                // the two pure terms: exact, no large-term cancellation
                for (int a = 0; a <= ki + 1; ++a)
                    for (int b = 0; b <= ki; ++b) {
                        if ((a == ki + 1 && b == ki) || (a == 0 && b == 0))
                            continue;
                        const cd term = binom(ki + 1, a) * binom(ki, b) *
                                        std::pow(q1, a) *
                                        std::pow(q2, ki + 1 - a) *
                                        std::pow(std::conj(q1), b) *
                                        std::pow(std::conj(q2), ki - b);
                        diff += term;
                    }
            } else {
                auto F = [&](cd z) { return std::pow(std::norm(z), k) * z; };
                diff = F(q1 + q2) - F(q1) - F(q2);
            }
            const double ad = std::abs(diff);
            l1 += ad;
            l2 += ad * ad;
            for (int h = 0; h < 2; ++h) {
                const double d = x - (h == 0 ? y1 : y2);
                const double w = 1.0 + d * d; // <x-y>^2
                l1w[h] += w * ad;
                l2w[h] += w * w * ad * ad;
            }
        }
        const double dx = grid->spacing();
        pt.l1 = l1 * dx;
        pt.l2 = std::sqrt(l2 * dx);
        pt.l1_weighted = std::max(l1w[0], l1w[1]) * dx;
        pt.l2_weighted = std::sqrt(std::max(l2w[0], l2w[1]) * dx);
        if (!(pt.l2 > 1e-280)) {
            pt.dropped = true;
            std::fprintf(stderr,
                         "interaction_scan: separation %g dropped "
                         "(tail underflow)\n",
                         L);
        }
        scan.points.push_back(pt);
    }

    std::vector<double> xs, y1v, y2v, y1w, y2w;
    for (const auto& pt : scan.points) {
        if (pt.dropped) continue;
        xs.push_back(pt.separation);
        y1v.push_back(std::log(pt.l1));
        y2v.push_back(std::log(pt.l2));
        y1w.push_back(std::log(pt.l1_weighted));
        y2w.push_back(std::log(pt.l2_weighted));
    }
    if (xs.size() >= 2) {
        scan.rate_l1 = -least_squares(xs, y1v).slope;
        scan.rate_l2 = -least_squares(xs, y2v).slope;
        scan.rate_l1_weighted = -least_squares(xs, y1w).slope;
        scan.rate_l2_weighted = -least_squares(xs, y2w).slope;
    }
    return scan;
}

BoundCheckReport verify_interactt(double alpha, double beta, double m_exp,
                                  const std::vector<double>& zetas) {
    if (!(alpha > 0.0) || !(beta > 0.0) || m_exp < 0.0)
        throw std::invalid_argument("verify_interactt: need alpha, beta > 0, m >= 0");
    BoundCheckReport rep;
    rep.min_ratio = kInf;
    for (double z : zetas) {
        if (!(z > 0.0))
            throw std::invalid_argument("verify_interactt: need zeta > 0");
        auto f = [&](double x) {
            const double xp = x > 0.0 ? x : 0.0;
            const double zp = z - x > 0.0 ? z - x : 0.0;
            return std::pow(std::abs(x), m_exp) *
                   std::exp(-alpha * xp - beta * zp);
        };
        double I = GK::integrate(f, -kInf, 0.0, 15, 1e-12) +
                   GK::integrate(f, 0.0, z, 15, 1e-12) +
                   GK::integrate(f, z, kInf, 15, 1e-12);
        BoundCheckPoint pt;
        pt.arg = z;
        pt.integral = I;
        if (std::abs(alpha - beta) < 1e-12)
            pt.envelope = (1.0 + std::pow(z, m_exp + 1.0)) * std::exp(-alpha * z);
        else
            pt.envelope = std::max((1.0 + std::pow(z, m_exp)) * std::exp(-alpha * z),
                                   std::exp(-beta * z));
        pt.ratio = pt.integral / pt.envelope;
        rep.min_ratio = std::min(rep.min_ratio, pt.ratio);
        rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
        rep.points.push_back(pt);
    }
    return rep;
}

BoundCheckReport verify_interpol(double a_exp, double b_exp,
                                 const std::vector<double>& ts) {
    BoundCheckReport rep;
    rep.min_ratio = kInf;
    for (double t : ts) {
        if (!(t > 0.0))
            throw std::invalid_argument("verify_interpol: need t > 0");
        auto f = [&](double s) {
            return std::pow(1.0 + t - s, -a_exp) * std::pow(1.0 + s, -b_exp);
        };
        BoundCheckPoint pt;
        pt.arg = t;
        pt.integral = GK::integrate(f, 0.0, t, 15, 1e-12);
        const double op = 1.0 + t;
        const bool a1 = std::abs(a_exp - 1.0) < 1e-12;
        const bool b1 = std::abs(b_exp - 1.0) < 1e-12;
        if (!a1 && !b1)
            pt.envelope = std::max({std::pow(op, 1.0 - a_exp - b_exp),
                                    std::pow(op, -a_exp), std::pow(op, -b_exp)});
        else if (b1)
            pt.envelope =
                std::max(1.0 / op, std::log(op) * std::pow(op, -a_exp));
        else
            pt.envelope =
                std::max(1.0 / op, std::log(op) * std::pow(op, -b_exp));
        pt.ratio = pt.integral / pt.envelope;
        rep.min_ratio = std::min(rep.min_ratio, pt.ratio);
        rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
        rep.points.push_back(pt);
    }
    return rep;
}

ConservedQuantities conserved_quantities(const ComplexField& psi, double k) {
    ConservedQuantities q;
    ComplexField dpsi = spectral_derivative(psi, 1);
    const Grid& g = *psi.grid();
    for (int j = 0; j < g.n(); ++j) {
        const double a2 = std::norm(psi[j]);
        q.mass += a2;
        q.energy += std::norm(dpsi[j]) - std::pow(a2, k + 1.0) / (k + 1.0);
        q.momentum += (std::conj(psi[j]) * dpsi[j]).imag();
    }
    q.mass *= g.spacing();
    q.energy *= g.spacing();
    q.momentum *= g.spacing();
    return q;
}

} // namespace nlslab
