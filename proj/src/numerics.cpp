#include "mde/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace mde::num {

double integrate(const std::vector<double>& values, double dx) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("integrate: need at least 2 nodes");
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += values[i];
    return s * dx;
}

double integrate(const Grid1D& g) { return integrate(g.values, g.dx()); }

double linear_interp(const Grid1D& g, double x) {
    if (x < g.lo || x > g.hi) return 0.0;
    const double dx = g.dx();
    double t = (x - g.lo) / dx;
    std::size_t j = static_cast<std::size_t>(t);
    if (j >= g.n - 1) {  // x == hi (or rounding slop at the last node)
        j = g.n - 2;
        t = static_cast<double>(g.n - 1);
    }
    const double frac = t - static_cast<double>(j);
    return g.values[j] + frac * (g.values[j + 1] - g.values[j]);
}

double bessel_i0(double x) {
    if (std::abs(x) > 50.0)
        throw std::domain_error("bessel_i0: series form restricted to |x| <= 50");
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

Grid1D fft_convolve(const Grid1D& f, const Grid1D& g) {
    if (f.n != g.n || f.lo != g.lo || f.hi != g.hi)
        throw std::invalid_argument("fft_convolve: grids must match");
    const std::size_t n = f.n;
    if (n < 8) throw std::invalid_argument("fft_convolve: n must be >= 8");
    const double dx = f.dx();
    // index of the x = 0 node; offsets (m - i) dx are then g samples at
    // index (m - i) + i0
    const double i0f = -f.lo / dx;
    const std::size_t i0 = static_cast<std::size_t>(std::llround(i0f));
    if (std::abs(i0f - static_cast<double>(i0)) > 1e-9 || i0 >= n)
        throw std::invalid_argument("fft_convolve: grid must contain x = 0 as a node");

    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> fa(m), ga(m);
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = f.values[i];
        ga[i] = g.values[i];
    }
    fft_pow2(fa, -1);
    fft_pow2(ga, -1);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= ga[i];
    fft_pow2(fa, +1);
    const double scale = dx / static_cast<double>(m);

    Grid1D out = f;
    for (std::size_t k = 0; k < n; ++k)
        out.values[k] = fa[k + i0].real() * scale;
    return out;
}

}  // namespace mde::num
