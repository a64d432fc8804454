#pragma once

#include <string>
#include <vector>

#include "mde/gibbs.hpp"
#include "mde/grid.hpp"

namespace mde::asym {

// Limit-law summary for the 1D quadratic-potential model: the centered-scaled
// estimator converges to N(0, tau_sq / J^2).
struct AsymptoticStats {
    double J = 0.0;
    double tau_sq = 0.0;
    double ratio = 0.0;  // tau_sq / J^2
    double sigma1_sq = 0.0;
    double sigma2_sq = 0.0;
};

// Auxiliary Gaussian scales entering h and J:
//   sigma1^2 = b^2 t0 / (t0 + s b^2),  sigma2^2 = b^2 t0 / (t0 + 2 s b^2).
double sigma1_squared(double theta0, double sigma_bar, double beta);
double sigma2_squared(double theta0, double sigma_bar, double beta);

// Information-like scalar J = (3/(4b)) (s/t0^2)^2 sigma2^5; equals the
// weighted L^2 energy of the theta-derivative of the model characteristic
// function (the quadrature form is the test oracle).
double j_scalar(double theta0, double sigma_bar, double beta);

// h(z) = (s/(2 t0^2 b)) [sigma1^3 (1 - sigma1^2 z^2) exp(-sigma1^2 z^2/2)
//                        - sigma2^3]; centered against mu(theta0).
double h_closed_form(double z, double theta0, double sigma_bar, double beta);

// Solution of the one-dimensional Poisson equation
//   theta0 V' phi' - sigma_bar phi'' = h,   V(x) = x^2/2,
// via H(y) = int_{-inf}^y h mu and phi'(y) = -H(y)/(sigma_bar mu(y)), with
// phi(0) = 0.  phi' is set to 0 where |H| < 1e-14 (the 1/mu factor would
// otherwise amplify tail rounding noise).  mu is returned alongside for
// downstream quadratures.
struct PhiSolution {
    num::Grid1D phi;
    num::Grid1D dphi;
    num::Grid1D mu;
};

PhiSolution phi_solve(double theta0, double sigma_bar, double beta,
                      const num::Grid1D& grid);
// Default grid: symmetric around 0 (node at 0 exactly), 8192 nodes, reaching
// where mu drops below 1e-12 of its peak.
PhiSolution phi_solve(double theta0, double sigma_bar, double beta);

// tau^2 = 2 sigma_bar int (phi')^2 mu, plus J and the ratio tau^2/J^2.
AsymptoticStats tau_squared(double theta0, double sigma_bar, double beta);

// 1D multiscale Langevin parameter set for the characteristic-function gap.
struct MultiscaleModel {
    double alpha = 2.0;
    double sigma = 1.0;
    gibbs::Potential1D pot;
    gibbs::SinPerturbation pert;
};

// |C_eps(u) - C_0(u)|: distance between the characteristic function of the
// oscillatory invariant density at scale eps and that of its homogenized
// limit, both by quadrature.  Requires eps in (0, 0.5].
double cf_gap(double eps, double u, const MultiscaleModel& m);

// Centered Gaussian test function f = N(0, scale^2) density.
struct GaussianTestFn {
    double scale = 1.0;
};

// |int f(x) [exp(p(x/eps)) - avg_period exp(p)] dx|: the oscillatory-average
// remainder whose decay order in eps the periodic-averaging bound controls.
// Requires eps in (0, 1].
double oscillatory_gap(const GaussianTestFn& f, const gibbs::SinPerturbation& p,
                       double eps);

// Right-hand side of the order-k averaging bound:
//   (eps/(2 pi))^k exp(sum_l |p_hat(l)|) ||f||_{W^{k,1}},
// with the Fourier-coefficient sum and the Sobolev norm computed numerically.
// Supports k in {1, 2}.
double oscillatory_bound(const GaussianTestFn& f, const gibbs::SinPerturbation& p,
                         double eps, int k);

// Least-squares fit of log(gap) against log(1/eps); decay of order r shows up
// as slope -r.
struct RateFit {
    std::vector<double> eps;
    std::vector<double> gap;
    double slope = 0.0;
};

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& gap);

RateFit cf_gap_ladder(const std::vector<double>& eps, double u,
                      const MultiscaleModel& m);
RateFit oscillatory_gap_ladder(const std::vector<double>& eps,
                               const GaussianTestFn& f,
                               const gibbs::SinPerturbation& p);

// CSV report: header "eps,gap,fitted_slope", one row per ladder point.
std::string rate_csv(const RateFit& r);

}  // namespace mde::asym
