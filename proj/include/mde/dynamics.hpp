#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mde/gibbs.hpp"

namespace mde::dyn {

// Stored, subsampled sample path.  dt is the stored spacing (integration uses
// a finer internal step); data is (m+1) x dim interleaved states.
struct Trajectory {
    std::uint32_t dim = 1;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> data;

    std::size_t points() const { return data.size() / dim; }
    std::size_t m() const { return points() - 1; }
    double T() const { return static_cast<double>(m()) * dt; }
    double x(std::size_t k) const { return data[k * dim]; }
    const double* state(std::size_t k) const { return data.data() + k * dim; }
};

struct SimulationError : std::runtime_error {
    std::size_t step;
    SimulationError(const std::string& msg, std::size_t step_)
        : std::runtime_error(msg), step(step_) {}
};

// dX = -coef dV(X) dt - multiscale * dp(X/eps)/eps dt + sqrt(2 noise) dW.
// Homogenized form: coef = theta, noise = sigma_bar, multiscale = false.
// Multiscale form:  coef = alpha, noise = sigma, multiscale = true (dt < eps^3).
struct Sde1D {
    gibbs::Potential1D pot;
    double coef = 1.0;
    double noise = 1.0;
    bool multiscale = false;
    gibbs::SinPerturbation p;
    double eps = 0.0;
};

// 2D counterpart: dX = -alpha M X dt - (1/eps)(a1 cos(X1/eps), a2 cos(X2/eps)) dt
//                      + sqrt(2 sigma) dW   (multiscale), or
//            dX = -Theta X dt + diag(sqrt(2 sigma k_i)) dW   (homogenized).
struct Sde2D {
    gibbs::Model2D model;
    bool multiscale = true;
    double eps = 0.0;
    std::array<std::array<double, 2>, 2> Theta{{{1.0, 0.0}, {0.0, 1.0}}};
    std::array<double, 2> k{1.0, 1.0};
};

// Default stored spacing of sample paths (integration step stays internal).
inline constexpr double kStoreDt = 1e-2;

Trajectory euler_maruyama(const Sde1D& sde, double x0, double T, double dt,
                          std::uint64_t seed, double store_dt = kStoreDt);
Trajectory euler_maruyama(const Sde2D& sde, std::array<double, 2> x0, double T,
                          double dt, std::uint64_t seed, double store_dt = kStoreDt);

// Slow-fast system driven by a Lorenz block on timescale eps^2:
//   dX/dt  = A X - B X^3 + (lambda/eps) Y2
//   dY1/dt = 10 (Y2 - Y1)/eps^2
//   dY2/dt = (28 Y1 - Y2 - Y1 Y3)/eps^2
//   dY3/dt = (Y1 Y2 - 8/3 Y3)/eps^2
// Deterministic RK4; requires dt <= eps^2/10; returns the slow component only.
struct FcnSpec {
    double A = 1.0;
    double B = 1.0;
    double lambda = 2.0 / 45.0;
    double eps = 0.1;
};

Trajectory rk4_fcn(const FcnSpec& spec, std::array<double, 4> u0, double T,
                   double dt, double store_dt = kStoreDt);

// Binary layout: header (dim u32, m u64, dt f64, seed u64), little-endian,
// then (m+1) x dim float64 states.
void write_binary(const Trajectory& t, const std::string& path);
Trajectory read_binary(const std::string& path);
// CSV with header t,x1[,x2].
void write_csv(const Trajectory& t, const std::string& path);

}  // namespace mde::dyn
