#include "mde/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mde/rng.hpp"

namespace mde::dyn {

namespace {

struct StepPlan {
    std::size_t total_steps;
    std::size_t store_every;
};

// Round the step count up to a multiple of the storage stride so the stored
// spacing is uniform and the last state lands on a stored index.
StepPlan plan_steps(double T, double dt, double store_dt) {
    if (T <= 0.0 || dt <= 0.0) throw std::invalid_argument("simulate: T and dt must be positive");
    std::size_t n = static_cast<std::size_t>(std::llround(T / dt));
    if (n == 0) n = 1;
    std::size_t k = static_cast<std::size_t>(std::llround(store_dt / dt));
    if (k == 0) k = 1;
    n = ((n + k - 1) / k) * k;
    return {n, k};
}

inline void check_state(double x, std::size_t step) {
    if (!std::isfinite(x) || std::abs(x) > 1e8)
        throw SimulationError("state blow-up at step " + std::to_string(step), step);
}

template <class Drift>
Trajectory run_em_1d(Drift&& drift, double noise, double x0, double T, double dt,
                     std::uint64_t seed, double store_dt) {
    const StepPlan plan = plan_steps(T, dt, store_dt);
    rng::NormalStream z(seed);
    const double ns = std::sqrt(2.0 * noise * dt);

    Trajectory out;
    out.dim = 1;
    out.dt = dt * static_cast<double>(plan.store_every);
    out.seed = seed;
    out.data.reserve(plan.total_steps / plan.store_every + 1);
    out.data.push_back(x0);

    double x = x0;
    for (std::size_t i = 0; i < plan.total_steps; ++i) {
        x += drift(x) * dt + ns * z.next();
        if ((i + 1) % plan.store_every == 0) {
            check_state(x, i + 1);
            out.data.push_back(x);
        }
    }
    return out;
}

}  // namespace

Trajectory euler_maruyama(const Sde1D& sde, double x0, double T, double dt,
                          std::uint64_t seed, double store_dt) {
    if (sde.noise <= 0.0) throw std::invalid_argument("euler_maruyama: noise must be positive");
    const gibbs::Potential1D pot = sde.pot;
    const double coef = sde.coef;
    if (sde.multiscale) {
        const double e3 = sde.eps * sde.eps * sde.eps;
        if (!(dt < e3))
            throw std::invalid_argument("euler_maruyama: multiscale integration needs dt < eps^3");
        const double ie = 1.0 / sde.eps;
        const gibbs::SinPerturbation p = sde.p;
        auto drift = [&](double x) { return -coef * pot.dV(x) - ie * p.dp(x * ie); };
        return run_em_1d(drift, sde.noise, x0, T, dt, seed, store_dt);
    }
    auto drift = [&](double x) { return -coef * pot.dV(x); };
    return run_em_1d(drift, sde.noise, x0, T, dt, seed, store_dt);
}

Trajectory euler_maruyama(const Sde2D& sde, std::array<double, 2> x0, double T,
                          double dt, std::uint64_t seed, double store_dt) {
    const StepPlan plan = plan_steps(T, dt, store_dt);
    rng::NormalStream z(seed);

    Trajectory out;
    out.dim = 2;
    out.dt = dt * static_cast<double>(plan.store_every);
    out.seed = seed;
    out.data.reserve(2 * (plan.total_steps / plan.store_every + 1));
    out.data.push_back(x0[0]);
    out.data.push_back(x0[1]);

    double x = x0[0], y = x0[1];
    if (sde.multiscale) {
        const double e3 = sde.eps * sde.eps * sde.eps;
        if (!(dt < e3))
            throw std::invalid_argument("euler_maruyama: multiscale integration needs dt < eps^3");
        const auto& M = sde.model.M;
        const double a = sde.model.alpha;
        const double ie = 1.0 / sde.eps;
        const double ns = std::sqrt(2.0 * sde.model.sigma * dt);
        const double a1 = sde.model.amp[0], a2 = sde.model.amp[1];
        for (std::size_t i = 0; i < plan.total_steps; ++i) {
            const double dx = -a * (M[0][0] * x + M[0][1] * y) - ie * a1 * std::cos(x * ie);
            const double dy = -a * (M[1][0] * x + M[1][1] * y) - ie * a2 * std::cos(y * ie);
            x += dx * dt + ns * z.next();
            y += dy * dt + ns * z.next();
            if ((i + 1) % plan.store_every == 0) {
                check_state(x, i + 1);
                check_state(y, i + 1);
                out.data.push_back(x);
                out.data.push_back(y);
            }
        }
    } else {
        const auto& Th = sde.Theta;
        const double s = sde.model.sigma;
        const double n1 = std::sqrt(2.0 * s * sde.k[0] * dt);
        const double n2 = std::sqrt(2.0 * s * sde.k[1] * dt);
        for (std::size_t i = 0; i < plan.total_steps; ++i) {
            const double dx = -(Th[0][0] * x + Th[0][1] * y);
            const double dy = -(Th[1][0] * x + Th[1][1] * y);
            x += dx * dt + n1 * z.next();
            y += dy * dt + n2 * z.next();
            if ((i + 1) % plan.store_every == 0) {
                check_state(x, i + 1);
                check_state(y, i + 1);
                out.data.push_back(x);
                out.data.push_back(y);
            }
        }
    }
    return out;
}

namespace {

using State4 = std::array<double, 4>;

inline State4 fcn_rhs(const FcnSpec& s, const State4& u) {
    const double ie2 = 1.0 / (s.eps * s.eps);
    return {s.A * u[0] - s.B * u[0] * u[0] * u[0] + (s.lambda / s.eps) * u[2],
            ie2 * 10.0 * (u[2] - u[1]),
            ie2 * (28.0 * u[1] - u[2] - u[1] * u[3]),
            ie2 * (u[1] * u[2] - (8.0 / 3.0) * u[3])};
}

}  // namespace

Trajectory rk4_fcn(const FcnSpec& spec, std::array<double, 4> u0, double T,
                   double dt, double store_dt) {
    if (!(dt <= spec.eps * spec.eps / 10.0 * (1.0 + 1e-12)))
        throw std::invalid_argument("rk4_fcn: needs dt <= eps^2/10");
    const StepPlan plan = plan_steps(T, dt, store_dt);

    Trajectory out;
    out.dim = 1;
    out.dt = dt * static_cast<double>(plan.store_every);
    out.seed = 0;
    out.data.reserve(plan.total_steps / plan.store_every + 1);
    out.data.push_back(u0[0]);

    State4 u = u0;
    for (std::size_t i = 0; i < plan.total_steps; ++i) {
        const State4 k1 = fcn_rhs(spec, u);
        State4 t;
        for (int j = 0; j < 4; ++j) t[j] = u[j] + 0.5 * dt * k1[j];
        const State4 k2 = fcn_rhs(spec, t);
        for (int j = 0; j < 4; ++j) t[j] = u[j] + 0.5 * dt * k2[j];
        const State4 k3 = fcn_rhs(spec, t);
        for (int j = 0; j < 4; ++j) t[j] = u[j] + dt * k3[j];
        const State4 k4 = fcn_rhs(spec, t);
        for (int j = 0; j < 4; ++j)
            u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if ((i + 1) % plan.store_every == 0) {
            for (int j = 0; j < 4; ++j) check_state(u[j], i + 1);
            out.data.push_back(u[0]);
        }
    }
    return out;
}

void write_binary(const Trajectory& t, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_binary: cannot open " + path);
    const std::uint64_t m = t.m();
    f.write(reinterpret_cast<const char*>(&t.dim), sizeof(t.dim));
    f.write(reinterpret_cast<const char*>(&m), sizeof(m));
    f.write(reinterpret_cast<const char*>(&t.dt), sizeof(t.dt));
    f.write(reinterpret_cast<const char*>(&t.seed), sizeof(t.seed));
    f.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("write_binary: write failed for " + path);
}

Trajectory read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_binary: cannot open " + path);
    Trajectory t;
    std::uint64_t m = 0;
    f.read(reinterpret_cast<char*>(&t.dim), sizeof(t.dim));
    f.read(reinterpret_cast<char*>(&m), sizeof(m));
    f.read(reinterpret_cast<char*>(&t.dt), sizeof(t.dt));
    f.read(reinterpret_cast<char*>(&t.seed), sizeof(t.seed));
    if (!f || t.dim == 0 || t.dim > 2)
        throw std::runtime_error("read_binary: bad header in " + path);
    t.data.resize((m + 1) * t.dim);
    f.read(reinterpret_cast<char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!f) throw std::runtime_error("read_binary: truncated data in " + path);
    return t;
}

void write_csv(const Trajectory& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_csv: cannot open " + path);
    f << (t.dim == 1 ? "t,x1\n" : "t,x1,x2\n");
    char buf[64];
    for (std::size_t k = 0; k < t.points(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(k) * t.dt);
        f << buf;
        for (std::uint32_t d = 0; d < t.dim; ++d) {
            std::snprintf(buf, sizeof(buf), "%.17g", t.data[k * t.dim + d]);
            f << ',' << buf;
        }
        f << '\n';
    }
}

}  // namespace mde::dyn
