#pragma once

#include <array>
#include <cstddef>

#include "mde/grid.hpp"

namespace mde::gibbs {

// Confining potentials used by the estimation models.
enum class PotentialKind {
    quadratic,  // V(x) = x^2/2
    quartic,    // V(x) = x^4/4 - x^2/2
    fcn,        // V(x) = B x^4/4 - A x^2/2, normalized so V(0) = 0
};

struct Potential1D {
    PotentialKind kind = PotentialKind::quadratic;
    double A = 0.0;  // fcn only
    double B = 0.0;  // fcn only

    double V(double x) const;
    double dV(double x) const;
};

// Smooth periodic perturbation p(y) = amp * sin(2 pi y / L) with its exact
// derivative; the multiscale drift uses dp(x/eps)/eps.
struct SinPerturbation {
    double L = 1.0;
    double amp = 1.0;

    double p(double y) const;
    double dp(double y) const;
};

// Effective diffusivity of the homogenized equation:
// K = 1 / (Z+ Z-), Z+- = (1/L) int_0^L exp(+-p(y)/sigma) dy.
double homogenization_factor(const SinPerturbation& p, double sigma);

// Invariant density family mu(theta, x) ~ exp(-theta V(x)/sigma_bar), cached
// on a uniform grid.  Domain: where the unnormalized density falls below
// 1e-12 of its maximum, widened by 20%; the grid always contains x = 0.
class GibbsDensity1D {
public:
    GibbsDensity1D(double theta, double sigma_bar, const Potential1D& pot,
                   std::size_t n = 4096);

    const num::Grid1D& grid() const { return grid_; }
    double theta() const { return theta_; }
    double sigma_bar() const { return sigma_bar_; }
    const Potential1D& potential() const { return pot_; }
    // Unnormalized mass Z(theta) = int exp(-theta V/sigma_bar) dx.
    double normalization() const { return Z_; }
    double operator()(double x) const;

    // C_theta(u) = int cos(u x) mu(x) dx (densities here are even, so the
    // characteristic function is real).
    double char_fn(double u) const;
    // d/dtheta C_theta(u) = -(1/sigma_bar) (E[V cos(uX)] - C(u) E[V]).
    double char_fn_grad(double u) const;
    // E[f] under mu for grid-sampled f.
    double mean_V() const;

private:
    double theta_;
    double sigma_bar_;
    Potential1D pot_;
    num::Grid1D grid_;   // normalized density values
    double Z_;
};

// Invariant density of the multiscale dynamics,
// mu_eps(x) ~ exp(-(alpha/sigma) V(x) - p(x/eps)/sigma), on a grid resolving
// the oscillation: dx <= eps L / 64.
num::Grid1D multiscale_density(double alpha, double sigma, const Potential1D& pot,
                               const SinPerturbation& p, double eps);

// 2D quadratic model: V(x) = x^T M x / 2 with separable perturbation
// p(x) = a1 sin(x1) + a2 sin(x2) (period 2 pi per axis).
struct Model2D {
    std::array<std::array<double, 2>, 2> M{{{4.0, 2.0}, {2.0, 3.0}}};
    double alpha = 1.0;
    double sigma = 1.5;
    std::array<double, 2> amp{1.0, 0.5};
};

// Per-axis homogenization factors k_i = 1/(Z_i+ Z_i-).
std::array<double, 2> homogenization_factor_2d(const Model2D& m);

}  // namespace mde::gibbs
