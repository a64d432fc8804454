#include "mde/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "mde/numerics.hpp"
#include "mde/simd.hpp"

namespace mde::est {

std::string EstimateResult::to_json() const {
    nlohmann::ordered_json j;
    if (theta.size() == 1)
        j["theta_hat"] = theta[0];
    else
        j["theta_hat"] = theta;
    j["objective"] = objective;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["seed"] = seed;
    j["wall_time"] = wall_time_s;
    return j.dump();
}

DistanceEvaluator::DistanceEvaluator(const dyn::Trajectory& traj, double beta)
    : beta_(beta) {
    if (beta <= 0.0) throw std::invalid_argument("DistanceEvaluator: beta > 0 required");
    const std::size_t np = traj.points();
    if (np < 2) throw std::invalid_argument("DistanceEvaluator: need at least 2 points");
    const double base = 1.0 / static_cast<double>(np - 1);
    x_.resize(np);
    w_.assign(np, base);
    w_.front() *= 0.5;
    w_.back() *= 0.5;
    for (std::size_t k = 0; k < np; ++k) x_[k] = traj.data[k * traj.dim];
    if (traj.dim == 2) {
        y_.resize(np);
        for (std::size_t k = 0; k < np; ++k) y_[k] = traj.data[k * traj.dim + 1];
    }
    for (double v : x_) max_abs_x_ = std::max(max_abs_x_, std::abs(v));
}

std::complex<double> DistanceEvaluator::empirical_cf(double u) const {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
        re += w_[k] * std::cos(u * x_[k]);
        im += w_[k] * std::sin(u * x_[k]);
    }
    return {re, im};
}

std::complex<double> DistanceEvaluator::empirical_cf2(double u1, double u2) const {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < x_.size(); ++k) {
        const double a = u1 * x_[k] + u2 * y_[k];
        re += w_[k] * std::cos(a);
        im += w_[k] * std::sin(a);
    }
    return {re, im};
}

double DistanceEvaluator::closed_form_gaussian(double v) const {
    const double b2 = beta_ * beta_;
    const double d1 = 1.0 + b2 * v;
    const double d2 = 1.0 + 2.0 * b2 * v;
    if (d1 <= 0.0 || d2 <= 0.0)
        throw std::domain_error("closed_form_gaussian: model variance out of range");
    const double c = 0.5 * b2 / d1;
    const double avg = simd::active().gauss_sum(x_.data(), w_.data(), x_.size(), c);
    return -2.0 / std::sqrt(d1) * avg + 1.0 / std::sqrt(d2);
}

double DistanceEvaluator::closed_form_gaussian2(const Mat2& S) const {
    if (y_.empty()) throw std::logic_error("closed_form_gaussian2: 1D trajectory");
    const double b2 = beta_ * beta_;
    // I + b^2 S and I + 2 b^2 S
    const double a11 = 1.0 + b2 * S[0][0], a12 = b2 * S[0][1];
    const double a21 = b2 * S[1][0], a22 = 1.0 + b2 * S[1][1];
    const double det1 = a11 * a22 - a12 * a21;
    const double c11 = 1.0 + 2.0 * b2 * S[0][0], c12 = 2.0 * b2 * S[0][1];
    const double c21 = 2.0 * b2 * S[1][0], c22 = 1.0 + 2.0 * b2 * S[1][1];
    const double det2 = c11 * c22 - c12 * c21;
    if (det1 <= 0.0 || det2 <= 0.0)
        throw std::domain_error("closed_form_gaussian2: model covariance out of range");
    const double q11 = b2 * a22 / det1;
    const double q22 = b2 * a11 / det1;
    const double q12 = -b2 * 0.5 * (a12 + a21) / det1;
    const double avg = simd::active().gauss_sum2(x_.data(), y_.data(), w_.data(),
                                                 x_.size(), q11, q12, q22);
    return -2.0 / std::sqrt(det1) * avg + 1.0 / std::sqrt(det2);
}

double DistanceEvaluator::fft_path(const gibbs::GibbsDensity1D& mu) const {
    // The convolution grid is derived from the data and the kernel width only.
    // Deriving it from mu's own grid would make the node positions move with
    // theta, and the drifting discretization error then pollutes the numerical
    // theta-gradients used by the optimizer.
    const double Wc = std::max(max_abs_x_, 4.0) + 8.0 / beta_;
    const std::size_t n = 8192;
    num::Grid1D f = num::make_centered_grid(Wc, n);
    const double r = mu.theta() / mu.sigma_bar();
    const gibbs::Potential1D& pot = mu.potential();
    f.fill([&](double x) { return std::exp(-r * pot.V(x)); });
    const double Z = num::integrate(f);
    for (auto& v : f.values) v /= Z;

    num::Grid1D k = num::make_centered_grid(Wc, n);
    const double b2h = 0.5 * beta_ * beta_;
    k.fill([&](double x) { return std::exp(-b2h * x * x); });

    const num::Grid1D conv = num::fft_convolve(f, k);
    const double avg = simd::active().interp_dot(conv.values.data(), conv.n, conv.lo,
                                                 conv.dx(), x_.data(), w_.data(), x_.size());
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = conv.values[i] * f.values[i];
    return -2.0 * avg + num::integrate(prod, conv.dx());
}

namespace {

constexpr int kMaxIter = 500;
constexpr double kGradTol = 1e-8;
constexpr double kStepTol = 1e-10;
constexpr double kBoundPad = 1e-8;

}  // namespace

EstimateResult minimize_scalar(const std::function<double(double)>& f, double init,
                               double lower) {
    auto proj = [&](double t) { return std::max(t, lower + kBoundPad); };
    EstimateResult res;
    double t = proj(init);
    double ft = f(t);
    double B = 1.0;  // curvature estimate
    double t_prev = t, g_prev = 0.0;
    bool have_prev = false;

    int it = 0;
    for (; it < kMaxIter; ++it) {
        const double h = 1e-6 * std::max(1.0, std::abs(t));
        double g;
        if (t - h > lower)
            g = (f(t + h) - f(t - h)) / (2.0 * h);
        else
            g = (f(t + h) - ft) / h;
        if (std::abs(g) < kGradTol) {
            res.converged = true;
            break;
        }
        if (have_prev && std::abs(t - t_prev) > 0.0) {
            const double Bn = (g - g_prev) / (t - t_prev);
            if (Bn > 1e-12) B = Bn;
        }
        t_prev = t;
        g_prev = g;
        have_prev = true;

        double d = -g / std::max(B, 1e-12);
        const double cap = 10.0 * std::max(1.0, std::abs(t));
        d = std::clamp(d, -cap, cap);

        double s = 1.0;
        double tn = t, fn = ft;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            tn = proj(t + s * d);
            if (std::abs(tn - t) < kStepTol * std::max(1.0, std::abs(t))) break;
            fn = f(tn);
            if (fn <= ft + 1e-4 * g * (tn - t)) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // fully projected or no descent at the smallest step: stationary
            res.converged = true;
            break;
        }
        const double step = std::abs(tn - t);
        t = tn;
        ft = fn;
        if (step < kStepTol * std::max(1.0, std::abs(t))) {
            res.converged = true;
            ++it;
            break;
        }
    }
    res.theta = {t};
    res.objective = ft;
    res.iterations = it;
    return res;
}

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Solve (H + lambda I) d = -g, escalating lambda until the factorization is
// positive definite.  3x3 Cholesky.
Vec3 newton_direction(Mat3 H, const Vec3& g) {
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) scale = std::max(scale, std::abs(H[i][i]));
    double lambda = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        Mat3 A = H;
        for (int i = 0; i < 3; ++i) A[i][i] += lambda;
        // Cholesky A = L L^T
        Mat3 L{};
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = A[i][j];
                for (int k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    L[i][i] = std::sqrt(s);
                } else {
                    L[i][j] = s / L[j][j];
                }
            }
        }
        if (ok) {
            Vec3 y{}, d{};
            for (int i = 0; i < 3; ++i) {
                double s = -g[i];
                for (int k = 0; k < i; ++k) s -= L[i][k] * y[k];
                y[i] = s / L[i][i];
            }
            for (int i = 2; i >= 0; --i) {
                double s = y[i];
                for (int k = i + 1; k < 3; ++k) s -= L[k][i] * d[k];
                d[i] = s / L[i][i];
            }
            return d;
        }
        lambda = (lambda == 0.0) ? 1e-8 * std::max(scale, 1.0) : lambda * 10.0;
    }
    // fall back to steepest descent
    return {-g[0], -g[1], -g[2]};
}

}  // namespace

Mat2 model_covariance_2d(const Mat2& A, const Mat2& Sigma) {
    const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    if (det == 0.0) throw std::domain_error("model_covariance_2d: singular drift matrix");
    const Mat2 inv{{{A[1][1] / det, -A[0][1] / det}, {-A[1][0] / det, A[0][0] / det}}};
    Mat2 S{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            S[i][j] = 0.0;
            for (int k = 0; k < 2; ++k) S[i][j] += inv[i][k] * Sigma[k][j];
        }
    const double off = 0.5 * (S[0][1] + S[1][0]);
    S[0][1] = S[1][0] = off;
    return S;
}

EstimateResult minimize_matrix_constrained(const std::function<double(const Mat2&)>& f,
                                           const Mat2& init, const Mat2& Sigma) {
    const double ratio = Sigma[1][1] / Sigma[0][0];
    auto assemble = [&](const Vec3& z) {
        return Mat2{{{z[0], z[2]}, {z[2] * ratio, z[1]}}};
    };

    Vec3 z{init[0][0], init[1][1], init[0][1]};
    if (std::abs(init[1][0] - init[0][1] * ratio) >
        1e-6 * (std::abs(init[1][0]) + std::abs(init[0][1]) + 1.0))
        throw std::invalid_argument(
            "minimize_matrix_constrained: init violates A21 = A12 S22/S11");

    // The raw barrier -mu(log A11 + log det A) is unbounded below along rays
    // where the distance objective plateaus (A -> infinity drives S = A^-1
    // Sigma toward 0 or toward a singular matrix, while -log det A keeps
    // falling), so the feasible region is compactified with a generous box.
    // The box terms vanish from the final answer: iteration stops on
    // stationarity of the true objective, not of the barrier composite.
    const double U =
        std::max(100.0, 10.0 * std::max({std::abs(z[0]), std::abs(z[1]), std::abs(z[2])}));
    auto feasible = [&](const Vec3& v) {
        return v[0] > 0.0 && v[0] < U && v[1] < U && std::abs(v[2]) < U &&
               v[0] * v[1] - v[2] * v[2] * ratio > 0.0;
    };
    if (!feasible(z))
        throw std::invalid_argument("minimize_matrix_constrained: infeasible init");

    auto barrier = [&](const Vec3& v) {
        const double det = v[0] * v[1] - v[2] * v[2] * ratio;
        return -(std::log(v[0]) + std::log(det) + std::log(U - v[0]) + std::log(U - v[1]) +
                 std::log(U - v[2]) + std::log(U + v[2]));
    };
    auto barrier_grad = [&](const Vec3& v) {
        const double det = v[0] * v[1] - v[2] * v[2] * ratio;
        return Vec3{-1.0 / v[0] + 1.0 / (U - v[0]) - v[1] / det,
                    1.0 / (U - v[1]) - v[0] / det,
                    1.0 / (U - v[2]) - 1.0 / (U + v[2]) + 2.0 * ratio * v[2] / det};
    };
    auto barrier_hess = [&](const Vec3& v) {
        const double det = v[0] * v[1] - v[2] * v[2] * ratio;
        const Vec3 d{v[1], v[0], -2.0 * ratio * v[2]};
        Mat3 H{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) H[i][j] = d[i] * d[j] / (det * det);
        H[0][1] -= 1.0 / det;
        H[1][0] -= 1.0 / det;
        H[2][2] += 2.0 * ratio / det;
        H[0][0] += 1.0 / (v[0] * v[0]) + 1.0 / ((U - v[0]) * (U - v[0]));
        H[1][1] += 1.0 / ((U - v[1]) * (U - v[1]));
        H[2][2] += 1.0 / ((U - v[2]) * (U - v[2])) + 1.0 / ((U + v[2]) * (U + v[2]));
        return H;
    };

    EstimateResult res;
    res.converged = true;
    int total_iters = 0;
    bool done = false;
    auto fz = [&](const Vec3& v) { return f(assemble(v)); };

    for (double mu_b = 1e-1; mu_b >= 0.9e-6 && !done; mu_b *= 0.1) {
        const Vec3 z_start = z;
        const double f_start = fz(z);
        bool stage_done = false;
        for (int it = 0; it < 50; ++it, ++total_iters) {
            Vec3 h;
            for (int i = 0; i < 3; ++i) h[i] = 1e-6 * std::max(1.0, std::abs(z[i]));
            const double f0 = fz(z);
            Vec3 g{};
            Mat3 H{};
            std::array<double, 3> fp{}, fm{};
            for (int i = 0; i < 3; ++i) {
                Vec3 zp = z, zm = z;
                zp[i] += h[i];
                zm[i] -= h[i];
                fp[i] = fz(zp);
                fm[i] = fz(zm);
                g[i] = (fp[i] - fm[i]) / (2.0 * h[i]);
                H[i][i] = (fp[i] - 2.0 * f0 + fm[i]) / (h[i] * h[i]);
            }
            // stationarity of the true objective ends the whole continuation
            if (std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])}) < kGradTol) {
                stage_done = true;
                done = true;
                break;
            }
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    Vec3 zpp = z, zpm = z, zmp = z, zmm = z;
                    zpp[i] += h[i]; zpp[j] += h[j];
                    zpm[i] += h[i]; zpm[j] -= h[j];
                    zmp[i] -= h[i]; zmp[j] += h[j];
                    zmm[i] -= h[i]; zmm[j] -= h[j];
                    H[i][j] = H[j][i] =
                        (fz(zpp) - fz(zpm) - fz(zmp) + fz(zmm)) / (4.0 * h[i] * h[j]);
                }
            const Vec3 gb = barrier_grad(z);
            const Mat3 Hb = barrier_hess(z);
            for (int i = 0; i < 3; ++i) {
                g[i] += mu_b * gb[i];
                for (int j = 0; j < 3; ++j) H[i][j] += mu_b * Hb[i][j];
            }
            const double F0 = f0 + mu_b * barrier(z);
            const Vec3 d = newton_direction(H, g);
            double s = 1.0;
            bool accepted = false;
            Vec3 zn = z;
            const double gd = g[0] * d[0] + g[1] * d[1] + g[2] * d[2];
            for (int ls = 0; ls < 60; ++ls) {
                zn = {z[0] + s * d[0], z[1] + s * d[1], z[2] + s * d[2]};
                if (feasible(zn) && fz(zn) + mu_b * barrier(zn) <= F0 + 1e-4 * s * gd) {
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted) {
                stage_done = true;  // no feasible descent left at this barrier level
                break;
            }
            double rel_step = 0.0;
            for (int i = 0; i < 3; ++i)
                rel_step = std::max(rel_step,
                                    std::abs(zn[i] - z[i]) / std::max(1.0, std::abs(z[i])));
            z = zn;
            if (rel_step < kStepTol) {
                stage_done = true;
                break;
            }
        }
        if (!stage_done) {
            // A stage that spends its budget without improving the true
            // objective was dragged by the barrier, not by the data; discard
            // it and retry from the previous iterate with a weaker barrier.
            if (!(fz(z) < f_start))
                z = z_start;
            else
                res.converged = false;
        }
    }

    const Mat2 A = assemble(z);
    res.theta = {A[0][0], A[0][1], A[1][0], A[1][1]};
    res.objective = f(A);
    res.iterations = total_iters;
    return res;
}

EstimateResult estimate(const EstimationProblem& p, const dyn::Trajectory& traj) {
    const auto t0 = std::chrono::steady_clock::now();
    DistanceEvaluator eval(traj, p.beta);
    EstimateResult res;

    switch (p.kind) {
        case ProblemKind::langevin1d_drift: {
            if (p.sigma_bar <= 0.0)
                throw std::invalid_argument("estimate: sigma_bar must be known and positive");
            std::function<double(double)> obj;
            if (p.use_fft) {
                obj = [&](double th) {
                    return eval.fft_path(gibbs::GibbsDensity1D(th, p.sigma_bar, p.pot));
                };
            } else {
                obj = [&](double th) { return eval.closed_form_gaussian(p.sigma_bar / th); };
            }
            res = minimize_scalar(obj, p.init, 0.0);
            if (!res.converged) {
                for (double alt : p.multistart) {
                    EstimateResult r2 = minimize_scalar(obj, alt, 0.0);
                    if (r2.converged) {
                        res = r2;
                        break;
                    }
                    if (r2.objective < res.objective) res = r2;
                }
            }
            break;
        }
        case ProblemKind::fcn_diffusion: {
            std::function<double(double)> obj;
            if (p.drift_B == 0.0 && p.drift_A < 0.0) {
                const double a2 = -2.0 * p.drift_A;
                obj = [&, a2](double s) { return eval.closed_form_gaussian(s / a2); };
            } else {
                gibbs::Potential1D pot{gibbs::PotentialKind::fcn, p.drift_A, p.drift_B};
                obj = [&, pot](double s) {
                    return eval.fft_path(gibbs::GibbsDensity1D(1.0, 0.5 * s, pot));
                };
            }
            res = minimize_scalar(obj, p.init, 0.0);
            break;
        }
        case ProblemKind::langevin2d_drift: {
            auto obj = [&](const Mat2& A) {
                return eval.closed_form_gaussian2(model_covariance_2d(A, p.Sigma));
            };
            const Mat2 A0{{{3.0, 0.5 * p.Sigma[0][0]}, {0.5 * p.Sigma[1][1], 6.0}}};
            res = minimize_matrix_constrained(obj, A0, p.Sigma);
            break;
        }
    }

    res.seed = traj.seed;
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace mde::est
