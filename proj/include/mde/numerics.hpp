#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mde/grid.hpp"

namespace mde::num {

// Composite trapezoid rule over the grid values.
double integrate(const Grid1D& g);
double integrate(const std::vector<double>& values, double dx);

// Piecewise-linear interpolation of grid values at x; 0 outside [lo, hi].
double linear_interp(const Grid1D& g, double x);

// Modified Bessel function I0 via its power series, truncated when a term
// drops below 1e-16 of the running sum.  Domain |x| <= 50.
double bessel_i0(double x);

// In-place iterative radix-2 FFT; size must be a power of two.
// sign = -1: forward transform, sign = +1: inverse (unscaled).
void fft_pow2(std::vector<std::complex<double>>& a, int sign);

std::size_t next_pow2(std::size_t n);

// Continuous convolution (f*g)(x) ~ dx * sum_i f_i g(x - x_i), computed by
// zero-padded FFT to the next power of two >= 2n-1 and returned on the same
// grid.  Requires f, g on identical grids with n >= 8 and a node at x = 0.
Grid1D fft_convolve(const Grid1D& f, const Grid1D& g);

}  // namespace mde::num
