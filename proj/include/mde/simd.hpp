#pragma once

#include <cstddef>

namespace mde::simd {

enum class Isa { scalar, avx2 };

// Kernel table for the hot data-parallel reductions.  All kernels are pure
// and deterministic for fixed inputs; the active table is chosen once at
// startup (cpuid, overridable via MDE_SIMD=scalar|avx2) so results are
// reproducible across runs and thread counts on a given machine.
struct Kernels {
    // sum_i w[i] * exp(-c * x[i]^2), c >= 0
    double (*gauss_sum)(const double* x, const double* w, std::size_t n, double c);
    // sum_i w[i] * exp(-0.5 * (q11 x^2 + 2 q12 x y + q22 y^2)), quadratic form PSD
    double (*gauss_sum2)(const double* x, const double* y, const double* w,
                         std::size_t n, double q11, double q12, double q22);
    // sum_j w[j] * lin(vals, x[j]) with zero extension outside [lo, lo+(n-1)dx]
    double (*interp_dot)(const double* vals, std::size_t n, double lo, double dx,
                         const double* x, const double* w, std::size_t m);
};

const Kernels& active();
Isa active_isa();
const char* isa_name(Isa isa);
bool avx2_available();

// Per-ISA tables, exposed for equivalence tests.
const Kernels& scalar_kernels();
#if MDE_HAVE_AVX2
const Kernels& avx2_kernels();
#endif

}  // namespace mde::simd
