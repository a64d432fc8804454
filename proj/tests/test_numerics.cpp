#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "mde/numerics.hpp"
#include "mde/rng.hpp"
#include "oracles.hpp"

using mde::num::Grid1D;
using mde::num::make_centered_grid;

TEST_SUITE("numerics") {

TEST_CASE("centered grid has an exact zero node and consistent spacing") {
    const Grid1D g = make_centered_grid(3.0, 64);
    CHECK(g.n == 64);
    CHECK(g.lo == -3.0);
    CHECK(g.x(32) == 0.0);
    CHECK(g.dx() == doctest::Approx(6.0 / 64.0).epsilon(1e-15));
    CHECK_THROWS_AS(Grid1D(1.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_centered_grid(-1.0, 8), std::invalid_argument);
}

TEST_CASE("trapezoid rule: exact on linear, second order on smooth") {
    Grid1D lin(0.0, 2.0, 9);
    lin.fill([](double x) { return 3.0 * x + 1.0; });
    CHECK(mde::num::integrate(lin) == doctest::Approx(8.0).epsilon(1e-14));

    Grid1D quad(0.0, 1.0, 2001);
    quad.fill([](double x) { return x * x; });
    CHECK(mde::num::integrate(quad) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    const std::vector<double> v = {1.0, 2.0, 4.0};
    CHECK(mde::num::integrate(v, 0.5) == doctest::Approx(0.5 * (0.5 + 2.0 + 2.0)));
}

TEST_CASE("linear interpolation: nodes exact, midpoints averaged, zero outside") {
    Grid1D g(0.0, 4.0, 5);
    g.values = {0.0, 1.0, 4.0, 9.0, 16.0};
    CHECK(mde::num::linear_interp(g, 2.0) == doctest::Approx(4.0));
    CHECK(mde::num::linear_interp(g, 2.5) == doctest::Approx(6.5));
    CHECK(mde::num::linear_interp(g, -0.1) == 0.0);
    CHECK(mde::num::linear_interp(g, 4.1) == 0.0);
    CHECK(mde::num::linear_interp(g, 4.0) == doctest::Approx(16.0));
}

TEST_CASE("bessel_i0 matches an independent 30-term power series") {
    for (double x : {0.0, 0.1, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0, 3.0, 5.0}) {
        const double ref = oracle::bessel_i0_series(x);
        CHECK(mde::num::bessel_i0(x) == doctest::Approx(ref).epsilon(1e-14));
        CHECK(mde::num::bessel_i0(-x) == doctest::Approx(ref).epsilon(1e-14));
    }
    // Frozen oracle values (30-term series evaluated in extended precision).
    CHECK(mde::num::bessel_i0(1.0) ==
          doctest::Approx(1.2660658777520082).epsilon(1e-15));
    CHECK(mde::num::bessel_i0(2.0 / 3.0) ==
          doctest::Approx(1.1142359006021993).epsilon(1e-15));
}

TEST_CASE("radix-2 FFT: inverse roundtrip and Parseval identity") {
    const std::size_t n = 256;
    std::vector<std::complex<double>> a(n);
    for (std::size_t k = 0; k < n; ++k)
        a[k] = {mde::rng::uniform(42, k) - 0.5, mde::rng::uniform(43, k) - 0.5};
    const auto orig = a;

    mde::num::fft_pow2(a, -1);

    double time_energy = 0.0, freq_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        time_energy += std::norm(orig[k]);
        freq_energy += std::norm(a[k]);
    }
    CHECK(freq_energy / static_cast<double>(n) ==
          doctest::Approx(time_energy).epsilon(1e-12));

    mde::num::fft_pow2(a, +1);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        worst = std::max(worst,
                         std::abs(a[k] / static_cast<double>(n) - orig[k]));
    CHECK(worst < 1e-12);
}

TEST_CASE("next_pow2") {
    CHECK(mde::num::next_pow2(1) == 1);
    CHECK(mde::num::next_pow2(2) == 2);
    CHECK(mde::num::next_pow2(3) == 4);
    CHECK(mde::num::next_pow2(1023) == 1024);
    CHECK(mde::num::next_pow2(1024) == 1024);
}

TEST_CASE("fft_convolve equals the O(n^2) direct sum on random data") {
    for (std::size_t n : {8u, 33u, 100u, 256u, 512u}) {
        // Even sizes: zero node at n/2.  Odd sizes: endpoints included, zero
        // node at (n-1)/2.
        Grid1D f = n % 2 == 0 ? make_centered_grid(2.0, n) : Grid1D(-2.0, 2.0, n);
        Grid1D g = f;
        for (std::size_t i = 0; i < n; ++i) {
            f.values[i] = mde::rng::uniform(7, i) - 0.5;
            g.values[i] = mde::rng::uniform(8, i) - 0.5;
        }
        const Grid1D fast = mde::num::fft_convolve(f, g);
        const Grid1D slow = oracle::direct_convolution(f, g);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(fast.values[i] - slow.values[i]));
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("fft_convolve of two Gaussians reproduces the analytic Gaussian") {
    const std::size_t n = 512;
    Grid1D f = make_centered_grid(12.0, n);
    Grid1D g = f;
    const double s1 = 1.0, s2 = 0.5;
    f.fill([&](double x) {
        return std::exp(-0.5 * x * x / (s1 * s1)) / (s1 * std::sqrt(2.0 * M_PI));
    });
    g.fill([&](double x) {
        return std::exp(-0.5 * x * x / (s2 * s2)) / (s2 * std::sqrt(2.0 * M_PI));
    });
    const Grid1D c = mde::num::fft_convolve(f, g);
    const double sc = std::sqrt(s1 * s1 + s2 * s2);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = c.x(i);
        if (std::abs(x) > 6.0) continue;
        const double ref =
            std::exp(-0.5 * x * x / (sc * sc)) / (sc * std::sqrt(2.0 * M_PI));
        CHECK(c.values[i] == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("fft_convolve input validation") {
    Grid1D f = make_centered_grid(1.0, 16);
    Grid1D g = make_centered_grid(2.0, 16);
    CHECK_THROWS_AS(mde::num::fft_convolve(f, g), std::invalid_argument);

    Grid1D tiny = make_centered_grid(1.0, 4);
    CHECK_THROWS_AS(mde::num::fft_convolve(tiny, tiny), std::invalid_argument);

    Grid1D off(0.05, 1.0, 16);  // no node lands on x = 0
    CHECK_THROWS_AS(mde::num::fft_convolve(off, off), std::invalid_argument);
}

}  // TEST_SUITE
