#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mde/dynamics.hpp"
#include "mde/gibbs.hpp"

namespace mde::est {

using Mat2 = std::array<std::array<double, 2>, 2>;

struct EstimateResult {
    std::vector<double> theta;  // scalar estimate, or row-major 2x2
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;

    std::string to_json() const;
};

// Weighted functionals of a stored path.  Weights are the uniform Riemann
// weights with endpoint halving, normalized to sum 1, so every sum below is a
// time average over [0, T].
class DistanceEvaluator {
public:
    DistanceEvaluator(const dyn::Trajectory& traj, double beta);

    double beta() const { return beta_; }
    std::size_t size() const { return x_.size(); }

    // sum_k w_k exp(i u X_k); |result| <= 1 by convexity.
    std::complex<double> empirical_cf(double u) const;
    std::complex<double> empirical_cf2(double u1, double u2) const;

    // Distance to the centered Gaussian model N(0, v), theta-independent
    // double integral dropped:
    //   -2/sqrt(1+b^2 v) avg exp(-b^2 X^2/(2(1+b^2 v))) + 1/sqrt(1+2 b^2 v).
    double closed_form_gaussian(double v) const;
    // 2D version with model covariance S.
    double closed_form_gaussian2(const Mat2& S) const;

    // Quadrature path for non-Gaussian models: the model term is
    // (mu * k)(x) with k(x) = exp(-b^2 x^2/2), evaluated on an FFT grid and
    // interpolated at the stored points:
    //   -2 avg (mu*k)(X_k) + int (mu*k) mu.
    double fft_path(const gibbs::GibbsDensity1D& mu) const;

private:
    std::vector<double> x_, y_, w_;
    double beta_;
    double max_abs_x_ = 0.0;
};

// Projected quasi-Newton descent for a scalar box-constrained objective.
// Gradients by central differences (one-sided against the bound), step
// 1e-6 max(1,|t|); trial points projected to t >= lower + 1e-8; converged
// when |grad| < 1e-8 or the relative step drops below 1e-10; at most 500
// iterations (exhaustion reports converged = false, no throw).
EstimateResult minimize_scalar(const std::function<double(double)>& f, double init,
                               double lower);

// 2x2 drift-matrix estimation with the reversibility constraint eliminated
// exactly (A21 = A12 S22/S11) and the open constraints A11 > 0, det A > 0
// handled by a log-barrier Newton continuation, mu = 1e-1 ... 1e-6.
// Infeasible initial matrix throws std::invalid_argument.
EstimateResult minimize_matrix_constrained(const std::function<double(const Mat2&)>& f,
                                           const Mat2& init, const Mat2& Sigma);

// Stationary covariance of dX = -Ax dt + sqrt(2 Sigma) dW for reversible A
// (A21/S22 = A12/S11): Sigma(A) = A^{-1} Sigma, symmetrized.
Mat2 model_covariance_2d(const Mat2& A, const Mat2& Sigma);

enum class ProblemKind { langevin1d_drift, langevin2d_drift, fcn_diffusion };

struct EstimationProblem {
    ProblemKind kind = ProblemKind::langevin1d_drift;
    double beta = 1.0;

    // langevin1d_drift: unknown theta, known sigma_bar
    gibbs::Potential1D pot;
    double sigma_bar = 0.0;
    double init = 10.0;
    bool use_fft = false;           // quartic potentials need the fft path
    std::vector<double> multistart = {1.0, 3.0};  // fallback inits on non-convergence

    // langevin2d_drift: unknown matrix, known diffusivity Sigma
    Mat2 Sigma{{{1.0, 0.0}, {0.0, 1.0}}};

    // fcn_diffusion: unknown sigma_bar of dX = (A X - B X^3) dt + sqrt(s) dW;
    // invariant density ~ exp(-2 V_eff/s), V_eff = B x^4/4 - A x^2/2
    double drift_A = 0.0;
    double drift_B = 0.0;
};

EstimateResult estimate(const EstimationProblem& p, const dyn::Trajectory& traj);

}  // namespace mde::est
