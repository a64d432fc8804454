#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <doctest.h>

#include "mde/dynamics.hpp"
#include "mde/gibbs.hpp"

using namespace mde::dyn;

namespace {

double sample_mean(const Trajectory& t, std::size_t comp = 0) {
    double acc = 0.0;
    for (std::size_t k = 0; k < t.points(); ++k) acc += t.state(k)[comp];
    return acc / static_cast<double>(t.points());
}

double sample_cov(const Trajectory& t, std::size_t a, std::size_t b) {
    const double ma = sample_mean(t, a), mb = sample_mean(t, b);
    double acc = 0.0;
    for (std::size_t k = 0; k < t.points(); ++k)
        acc += (t.state(k)[a] - ma) * (t.state(k)[b] - mb);
    return acc / static_cast<double>(t.points());
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("stored path layout: spacing, duration, accessors") {
    Sde1D sde;  // homogenized OU, coef 1, noise 1
    const Trajectory t = euler_maruyama(sde, 0.5, 1.0, 1e-3, 7);
    CHECK(t.dim == 1);
    CHECK(t.dt == doctest::Approx(kStoreDt).epsilon(1e-15));
    CHECK(t.points() == 101);
    CHECK(t.m() == 100);
    CHECK(t.T() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.x(0) == 0.5);
    CHECK(t.seed == 7);
}

TEST_CASE("identical seeds give identical paths, different seeds differ") {
    Sde1D sde;
    const Trajectory a = euler_maruyama(sde, 1.0, 5.0, 1e-3, 42);
    const Trajectory b = euler_maruyama(sde, 1.0, 5.0, 1e-3, 42);
    const Trajectory c = euler_maruyama(sde, 1.0, 5.0, 1e-3, 43);
    CHECK(a.data == b.data);
    bool differs = false;
    for (std::size_t k = 0; k < a.points(); ++k)
        differs = differs || (a.x(k) != c.x(k));
    CHECK(differs);
}

TEST_CASE("OU stationary variance matches noise/coef") {
    Sde1D sde;
    sde.coef = 2.0;
    sde.noise = 1.0;  // dX = -2X dt + sqrt(2) dW, Var = 1/2
    const Trajectory t = euler_maruyama(sde, 0.0, 2000.0, 1e-3, 101);
    CHECK(std::abs(sample_cov(t, 0, 0) - 0.5) < 0.025);  // 5% of the truth
    CHECK(std::abs(sample_mean(t)) < 0.05);
}

TEST_CASE("ergodic average of cos matches the Gaussian moment") {
    Sde1D sde;
    sde.coef = 2.0;
    sde.noise = 1.0;  // Var 1/2, E[cos X] = exp(-1/4)
    const Trajectory t = euler_maruyama(sde, 0.0, 500.0, 1e-3, 11);
    double acc = 0.0;
    for (std::size_t k = 0; k < t.points(); ++k) acc += std::cos(t.x(k));
    acc /= static_cast<double>(t.points());
    CHECK(std::abs(acc - std::exp(-0.25)) < 0.05);
}

TEST_CASE("multiscale form enforces dt below eps^3") {
    Sde1D sde;
    sde.multiscale = true;
    sde.eps = 0.1;
    CHECK_THROWS_AS(euler_maruyama(sde, 0.0, 1.0, 2e-3, 1), std::invalid_argument);
    const Trajectory ok = euler_maruyama(sde, 0.0, 1.0, 5e-4, 1);
    CHECK(ok.points() > 0);
}

TEST_CASE("diverging drift raises SimulationError") {
    Sde1D sde;
    sde.coef = -5.0;  // dX = +5 X dt, exponential blow-up
    sde.noise = 0.01;
    CHECK_THROWS_AS(euler_maruyama(sde, 1.0, 20.0, 1e-3, 3), SimulationError);
}

TEST_CASE("2D homogenized covariance solves the Lyapunov equation") {
    using mde::gibbs::homogenization_factor_2d;
    Sde2D sde;
    sde.multiscale = false;
    sde.k = homogenization_factor_2d(sde.model);
    // Theta = alpha diag(k) M; its stationary covariance has the closed form
    // (sigma/alpha) M^{-1} = [[0.5625, -0.375], [-0.375, 0.75]].
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            sde.Theta[i][j] = sde.model.alpha * sde.k[i] * sde.model.M[i][j];
    const Trajectory t = euler_maruyama(sde, {0.0, 0.0}, 2000.0, 1e-3, 17);
    CHECK(t.dim == 2);
    CHECK(std::abs(sample_cov(t, 0, 0) - 0.5625) < 0.06);
    CHECK(std::abs(sample_cov(t, 1, 1) - 0.75) < 0.06);
    CHECK(std::abs(sample_cov(t, 0, 1) + 0.375) < 0.05);
}

TEST_CASE("2D multiscale integrator runs and is seed-deterministic") {
    Sde2D sde;  // multiscale by default
    sde.eps = 0.25;
    const Trajectory a = euler_maruyama(sde, {1.0, 1.0}, 5.0, 1e-3, 5);
    const Trajectory b = euler_maruyama(sde, {1.0, 1.0}, 5.0, 1e-3, 5);
    CHECK(a.data == b.data);
    CHECK(a.points() == 501);
}

TEST_CASE("slow-fast integrator: exact linear decay with the fast block at rest") {
    // y0 = 0 is a fixed point of the fast block, so the slow equation reduces
    // to x' = A x with A = -1 and x(T) = x0 exp(-T).
    FcnSpec spec;
    spec.A = -1.0;
    spec.B = 0.0;
    const Trajectory t = rk4_fcn(spec, {2.0, 0.0, 0.0, 0.0}, 5.0, 1e-3);
    CHECK(t.dim == 1);
    CHECK(t.x(t.m()) == doctest::Approx(2.0 * std::exp(-5.0)).epsilon(1e-8));
}

TEST_CASE("slow-fast integrator converges at fourth order") {
    // With the fast block at rest, x' = x - x^3 has the closed solution
    // x(t) = x0 e^t / sqrt(1 + x0^2 (e^{2t} - 1)).
    FcnSpec spec;
    spec.eps = 0.5;
    const double x0 = 0.2, T = 2.0;
    const double e2 = std::exp(2.0 * T);
    const double exact = x0 * std::exp(T) / std::sqrt(1.0 + x0 * x0 * (e2 - 1.0));
    auto err = [&](double dt) {
        const Trajectory t = rk4_fcn(spec, {x0, 0.0, 0.0, 0.0}, T, dt, dt);
        return std::abs(t.x(t.m()) - exact);
    };
    const double ratio = err(0.02) / err(0.01);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("slow-fast integrator enforces its step cap and stays bounded") {
    FcnSpec spec;  // eps 0.1: cap dt <= 1e-3
    CHECK_THROWS_AS(rk4_fcn(spec, {1.0, 1.0, 1.0, 1.0}, 1.0, 5e-3),
                    std::invalid_argument);
    const Trajectory t = rk4_fcn(spec, {1.0, 1.0, 1.0, 1.0}, 10.0, 5e-4);
    double peak = 0.0;
    for (std::size_t k = 0; k < t.points(); ++k)
        peak = std::max(peak, std::abs(t.x(k)));
    CHECK(std::isfinite(peak));
    CHECK(peak < 20.0);
}

TEST_CASE("binary round trip preserves the trajectory exactly") {
    Sde1D sde;
    const Trajectory t = euler_maruyama(sde, 1.0, 2.0, 1e-3, 99);
    const char* path = "tmp_traj_roundtrip.bin";
    write_binary(t, path);
    const Trajectory r = read_binary(path);
    std::remove(path);
    CHECK(r.dim == t.dim);
    CHECK(r.dt == t.dt);
    CHECK(r.seed == t.seed);
    CHECK(r.data == t.data);
}

}  // TEST_SUITE
