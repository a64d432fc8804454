#include "mde/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "mde/numerics.hpp"

namespace mde::asym {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive(double theta0, double sigma_bar, double beta) {
    if (theta0 <= 0.0 || sigma_bar <= 0.0 || beta <= 0.0)
        throw std::invalid_argument("asymptotics: parameters must be positive");
}

}  // namespace

double sigma1_squared(double theta0, double sigma_bar, double beta) {
    require_positive(theta0, sigma_bar, beta);
    const double b2 = beta * beta;
    return b2 * theta0 / (theta0 + sigma_bar * b2);
}

double sigma2_squared(double theta0, double sigma_bar, double beta) {
    require_positive(theta0, sigma_bar, beta);
    const double b2 = beta * beta;
    return b2 * theta0 / (theta0 + 2.0 * sigma_bar * b2);
}

double j_scalar(double theta0, double sigma_bar, double beta) {
    const double s2 = sigma2_squared(theta0, sigma_bar, beta);
    const double r = sigma_bar / (theta0 * theta0);
    return 0.75 / beta * r * r * s2 * s2 * std::sqrt(s2);
}

double h_closed_form(double z, double theta0, double sigma_bar, double beta) {
    const double s1 = sigma1_squared(theta0, sigma_bar, beta);
    const double s2 = sigma2_squared(theta0, sigma_bar, beta);
    const double c = sigma_bar / (2.0 * theta0 * theta0 * beta);
    const double s1z2 = s1 * z * z;
    return c * (s1 * std::sqrt(s1) * (1.0 - s1z2) * std::exp(-0.5 * s1z2) -
                s2 * std::sqrt(s2));
}

PhiSolution phi_solve(double theta0, double sigma_bar, double beta,
                      const num::Grid1D& grid) {
    require_positive(theta0, sigma_bar, beta);
    const std::size_t n = grid.n;
    const double dx = grid.dx();

    PhiSolution sol;
    sol.mu = grid;
    sol.mu.fill([&](double x) { return std::exp(-0.5 * theta0 * x * x / sigma_bar); });
    const double Z = num::integrate(sol.mu);
    for (auto& v : sol.mu.values) v /= Z;

    // H(y) = int_{lo}^{y} h mu, cumulative trapezoid; centering makes the
    // lower limit equivalent to -infinity up to the truncated tail mass.
    std::vector<double> hmu(n);
    for (std::size_t i = 0; i < n; ++i)
        hmu[i] = h_closed_form(grid.x(i), theta0, sigma_bar, beta) * sol.mu.values[i];
    std::vector<double> H(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        H[i] = H[i - 1] + 0.5 * (hmu[i - 1] + hmu[i]) * dx;
    if (std::abs(H[n - 1]) > 1e-6)
        throw std::runtime_error(
            "phi_solve: centering violated, int h mu does not vanish at the right "
            "boundary");

    sol.dphi = grid;
    for (std::size_t i = 0; i < n; ++i)
        sol.dphi.values[i] =
            (std::abs(H[i]) < 1e-14) ? 0.0 : -H[i] / (sigma_bar * sol.mu.values[i]);

    sol.phi = grid;
    sol.phi.values[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        sol.phi.values[i] = sol.phi.values[i - 1] +
                            0.5 * (sol.dphi.values[i - 1] + sol.dphi.values[i]) * dx;
    const double at_zero = num::linear_interp(sol.phi, 0.0);
    for (auto& v : sol.phi.values) v -= at_zero;
    return sol;
}

PhiSolution phi_solve(double theta0, double sigma_bar, double beta) {
    require_positive(theta0, sigma_bar, beta);
    // exp(-theta0 L^2/(2 sigma_bar)) < 1e-12 at the boundary, with 5% slack.
    const double L = 1.05 * std::sqrt(2.0 * sigma_bar / theta0 * std::log(1e12));
    return phi_solve(theta0, sigma_bar, beta, num::make_centered_grid(L, 8192));
}

AsymptoticStats tau_squared(double theta0, double sigma_bar, double beta) {
    const PhiSolution sol = phi_solve(theta0, sigma_bar, beta);
    std::vector<double> integrand(sol.mu.n);
    for (std::size_t i = 0; i < sol.mu.n; ++i) {
        const double d = sol.dphi.values[i];
        integrand[i] = d * d * sol.mu.values[i];
    }
    AsymptoticStats st;
    st.sigma1_sq = sigma1_squared(theta0, sigma_bar, beta);
    st.sigma2_sq = sigma2_squared(theta0, sigma_bar, beta);
    st.J = j_scalar(theta0, sigma_bar, beta);
    st.tau_sq = 2.0 * sigma_bar * num::integrate(integrand, sol.mu.dx());
    st.ratio = st.tau_sq / (st.J * st.J);
    return st;
}

double cf_gap(double eps, double u, const MultiscaleModel& m) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("cf_gap: eps must lie in (0, 0.5]");
    const num::Grid1D mu_eps =
        gibbs::multiscale_density(m.alpha, m.sigma, m.pot, m.pert, eps);
    std::vector<double> re(mu_eps.n), im(mu_eps.n);
    for (std::size_t i = 0; i < mu_eps.n; ++i) {
        const double x = mu_eps.x(i);
        re[i] = std::cos(u * x) * mu_eps.values[i];
        im[i] = std::sin(u * x) * mu_eps.values[i];
    }
    const std::complex<double> c_eps(num::integrate(re, mu_eps.dx()),
                                     num::integrate(im, mu_eps.dx()));
    // The homogenized invariant density exp(-theta0 V/sigma_bar) coincides
    // with exp(-alpha V/sigma): theta0/sigma_bar = alpha/sigma.
    const gibbs::GibbsDensity1D limit(m.alpha, m.sigma, m.pot);
    return std::abs(c_eps - std::complex<double>(limit.char_fn(u), 0.0));
}

double oscillatory_gap(const GaussianTestFn& f, const gibbs::SinPerturbation& p,
                       double eps) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::invalid_argument("oscillatory_gap: eps must lie in (0, 1]");
    if (f.scale <= 0.0) throw std::invalid_argument("oscillatory_gap: scale > 0");

    // Period average of exp(p); trapezoid on one period is spectrally accurate.
    num::Grid1D cell(0.0, p.L, 4097);
    cell.fill([&](double y) { return std::exp(p.p(y)); });
    const double avg = num::integrate(cell) / p.L;

    // Outer grid: cover the Gaussian mass and resolve the eps-oscillation.
    const double W = 8.0 * f.scale;
    const double target_dx = eps * p.L / 64.0;
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * W / target_dx)) + 1;
    n = std::max<std::size_t>(n, 4097);
    num::Grid1D outer(-W, W, n);
    const double inv = 1.0 / (f.scale * std::sqrt(2.0 * kPi));
    outer.fill([&](double x) {
        const double fx = inv * std::exp(-0.5 * x * x / (f.scale * f.scale));
        return fx * (std::exp(p.p(x / eps)) - avg);
    });
    return std::abs(num::integrate(outer));
}

double oscillatory_bound(const GaussianTestFn& f, const gibbs::SinPerturbation& p,
                         double eps, int k) {
    if (k != 1 && k != 2)
        throw std::invalid_argument("oscillatory_bound: k must be 1 or 2");
    if (f.scale <= 0.0) throw std::invalid_argument("oscillatory_bound: scale > 0");

    // sum_l |p_hat(l)| over |l| <= 64 by trapezoid on one period (exact for
    // trigonometric polynomials on a uniform grid).
    const std::size_t nc = 4096;
    const double dy = p.L / static_cast<double>(nc);
    double coeff_sum = 0.0;
    for (int l = -64; l <= 64; ++l) {
        std::complex<double> c(0.0, 0.0);
        for (std::size_t j = 0; j < nc; ++j) {
            const double y = static_cast<double>(j) * dy;
            c += p.p(y) * std::exp(std::complex<double>(0.0, -2.0 * kPi * l * y / p.L));
        }
        coeff_sum += std::abs(c) / static_cast<double>(nc);
    }

    // ||f||_{W^{k,1}} = sum_{j<=k} int |f^{(j)}|, Gaussian derivatives in
    // closed form under the quadrature.
    const double s = f.scale;
    const double inv = 1.0 / (s * std::sqrt(2.0 * kPi));
    const double W = 10.0 * s;
    num::Grid1D g(-W, W, 8193);
    double norm = 0.0;
    for (int j = 0; j <= k; ++j) {
        g.fill([&](double x) {
            const double fx = inv * std::exp(-0.5 * x * x / (s * s));
            if (j == 0) return fx;
            if (j == 1) return std::abs(-x / (s * s) * fx);
            return std::abs((x * x / (s * s * s * s) - 1.0 / (s * s)) * fx);
        });
        norm += num::integrate(g);
    }
    return std::pow(eps / (2.0 * kPi), k) * std::exp(coeff_sum) * norm;
}

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& gap) {
    if (eps.size() != gap.size() || eps.size() < 2)
        throw std::invalid_argument("fit_rate: need matching ladders, length >= 2");
    RateFit r;
    r.eps = eps;
    r.gap = gap;
    const std::size_t n = eps.size();
    double tm = 0.0, ym = 0.0;
    std::vector<double> t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = std::log(1.0 / eps[i]);
        y[i] = std::log(std::max(gap[i], 1e-300));
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    r.slope = num / den;
    return r;
}

RateFit cf_gap_ladder(const std::vector<double>& eps, double u,
                      const MultiscaleModel& m) {
    std::vector<double> gaps(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) gaps[i] = cf_gap(eps[i], u, m);
    return fit_rate(eps, gaps);
}

RateFit oscillatory_gap_ladder(const std::vector<double>& eps,
                               const GaussianTestFn& f,
                               const gibbs::SinPerturbation& p) {
    std::vector<double> gaps(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i)
        gaps[i] = oscillatory_gap(f, p, eps[i]);
    return fit_rate(eps, gaps);
}

std::string rate_csv(const RateFit& r) {
    std::string out = "eps,gap,fitted_slope\n";
    char buf[128];
    for (std::size_t i = 0; i < r.eps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.eps[i], r.gap[i],
                      r.slope);
        out += buf;
    }
    return out;
}

}  // namespace mde::asym
