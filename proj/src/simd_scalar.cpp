#include <cmath>

#include "mde/simd.hpp"

// Reference kernels.  These define the semantics the vector variants are
// tested against.

namespace mde::simd {
namespace {

double gauss_sum_scalar(const double* x, const double* w, std::size_t n, double c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * std::exp(-c * x[i] * x[i]);
    return acc;
}

double gauss_sum2_scalar(const double* x, const double* y, const double* w,
                         std::size_t n, double q11, double q12, double q22) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = q11 * x[i] * x[i] + 2.0 * q12 * x[i] * y[i] + q22 * y[i] * y[i];
        acc += w[i] * std::exp(-0.5 * q);
    }
    return acc;
}

double interp_dot_scalar(const double* vals, std::size_t n, double lo, double dx,
                         const double* x, const double* w, std::size_t m) {
    const double hi = lo + dx * static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double xj = x[j];
        if (xj < lo || xj > hi) continue;
        double t = (xj - lo) / dx;
        std::size_t k = static_cast<std::size_t>(t);
        if (k >= n - 1) {
            k = n - 2;
            t = static_cast<double>(n - 1);
        }
        const double frac = t - static_cast<double>(k);
        acc += w[j] * (vals[k] + frac * (vals[k + 1] - vals[k]));
    }
    return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{gauss_sum_scalar, gauss_sum2_scalar, interp_dot_scalar};
    return k;
}

}  // namespace mde::simd
