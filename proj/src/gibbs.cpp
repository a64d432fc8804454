#include "mde/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mde/numerics.hpp"

namespace mde::gibbs {

double Potential1D::V(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return 0.5 * x * x;
        case PotentialKind::quartic: return 0.25 * x * x * x * x - 0.5 * x * x;
        case PotentialKind::fcn: return 0.25 * B * x * x * x * x - 0.5 * A * x * x;
    }
    return 0.0;
}

double Potential1D::dV(double x) const {
    switch (kind) {
        case PotentialKind::quadratic: return x;
        case PotentialKind::quartic: return x * x * x - x;
        case PotentialKind::fcn: return B * x * x * x - A * x;
    }
    return 0.0;
}

double SinPerturbation::p(double y) const { return amp * std::sin(2.0 * M_PI * y / L); }

double SinPerturbation::dp(double y) const {
    return amp * (2.0 * M_PI / L) * std::cos(2.0 * M_PI * y / L);
}

double homogenization_factor(const SinPerturbation& p, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("homogenization_factor: sigma > 0 required");
    const std::size_t n = 4097;  // trapezoid over one period; p smooth => spectral accuracy
    const double dy = p.L / static_cast<double>(n - 1);
    double zp = 0.0, zm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        const double v = p.p(static_cast<double>(i) * dy) / sigma;
        zp += w * std::exp(v);
        zm += w * std::exp(-v);
    }
    zp *= dy / p.L;
    zm *= dy / p.L;
    return 1.0 / (zp * zm);
}

namespace {

// Smallest W > 0 with envelope(W) < 1e-12 * max envelope, then widened 20%.
// envelope is the unnormalized density along +x and -x (even potentials here,
// but scan both sides for safety).
template <class F>
double truncation_halfwidth(F&& unnorm) {
    double peak = unnorm(0.0);
    for (double x = 0.0; x <= 4.0; x += 0.01) {
        peak = std::max(peak, unnorm(x));
        peak = std::max(peak, unnorm(-x));
    }
    const double cut = 1e-12 * peak;
    double W = 1.0;
    while (W < 1e4) {
        if (unnorm(W) < cut && unnorm(-W) < cut) break;
        W *= 1.25;
    }
    // bisect down to the crossing for a tight window
    double lo = W / 1.25, hi = W;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (unnorm(mid) < cut && unnorm(-mid) < cut)
            hi = mid;
        else
            lo = mid;
    }
    return 1.2 * hi;
}

}  // namespace

GibbsDensity1D::GibbsDensity1D(double theta, double sigma_bar, const Potential1D& pot,
                               std::size_t n)
    : theta_(theta), sigma_bar_(sigma_bar), pot_(pot) {
    if (theta <= 0.0 || sigma_bar <= 0.0)
        throw std::invalid_argument("GibbsDensity1D: theta and sigma_bar must be positive");
    const double r = theta / sigma_bar;
    auto unnorm = [&](double x) { return std::exp(-r * pot_.V(x)); };
    const double W = truncation_halfwidth(unnorm);
    grid_ = num::make_centered_grid(W, n);
    grid_.fill(unnorm);
    Z_ = num::integrate(grid_);
    for (auto& v : grid_.values) v /= Z_;
}

double GibbsDensity1D::operator()(double x) const { return num::linear_interp(grid_, x); }

double GibbsDensity1D::char_fn(double u) const {
    std::vector<double> vals(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
        vals[i] = std::cos(u * grid_.x(i)) * grid_.values[i];
    return num::integrate(vals, grid_.dx());
}

double GibbsDensity1D::mean_V() const {
    std::vector<double> vals(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
        vals[i] = pot_.V(grid_.x(i)) * grid_.values[i];
    return num::integrate(vals, grid_.dx());
}

double GibbsDensity1D::char_fn_grad(double u) const {
    std::vector<double> vals(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i)
        vals[i] = pot_.V(grid_.x(i)) * std::cos(u * grid_.x(i)) * grid_.values[i];
    const double EVcos = num::integrate(vals, grid_.dx());
    return -(EVcos - char_fn(u) * mean_V()) / sigma_bar_;
}

num::Grid1D multiscale_density(double alpha, double sigma, const Potential1D& pot,
                               const SinPerturbation& p, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("multiscale_density: eps > 0 required");
    const double r = alpha / sigma;
    auto unnorm = [&](double x) {
        return std::exp(-r * pot.V(x) - p.p(x / eps) / sigma);
    };
    const double W = truncation_halfwidth(unnorm);
    const double dx_max = eps * p.L / 64.0;
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * W / dx_max));
    n += n % 2;  // even, so make_centered_grid puts a node at 0
    num::Grid1D g = num::make_centered_grid(W, n);
    g.fill(unnorm);
    const double Z = num::integrate(g);
    for (auto& v : g.values) v /= Z;
    return g;
}

std::array<double, 2> homogenization_factor_2d(const Model2D& m) {
    std::array<double, 2> k{};
    for (int i = 0; i < 2; ++i) {
        SinPerturbation p{2.0 * M_PI, m.amp[static_cast<std::size_t>(i)]};
        k[static_cast<std::size_t>(i)] = homogenization_factor(p, m.sigma);
    }
    return k;
}

}  // namespace mde::gibbs
