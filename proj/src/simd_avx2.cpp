#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "mde/simd.hpp"

// AVX2 + FMA variants of the reduction kernels.  exp is a Cephes-style
// rational approximation (range reduction by log 2, P/Q of degree 4/6 in the
// reduced argument), accurate to ~1 ulp over the range used here; inputs
// below -708.4 flush to zero exactly like the libm underflow.

namespace mde::simd {
namespace {

inline __m256d exp_pd(__m256d x) {
    const __m256d hi_clamp = _mm256_set1_pd(709.0);
    const __m256d underflow = _mm256_set1_pd(-708.396418532264);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);

    const __m256d xin = x;
    x = _mm256_min_pd(x, hi_clamp);
    x = _mm256_max_pd(x, _mm256_set1_pd(-745.0));

    __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(log2e, x, half));
    x = _mm256_fnmadd_pd(n, c1, x);
    x = _mm256_fnmadd_pd(n, c2, x);

    const __m256d xx = _mm256_mul_pd(x, x);
    __m256d px = _mm256_set1_pd(1.26177193074810590878e-4);
    px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(3.02994407707441961300e-2));
    px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
    px = _mm256_mul_pd(px, x);
    __m256d qx = _mm256_set1_pd(3.00198505138664455042e-6);
    qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.52448340349684104192e-3));
    qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
    qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000005e0));
    __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    r = _mm256_fmadd_pd(_mm256_add_pd(r, r), one, one);  // 1 + 2 px/(qx - px)

    // scale by 2^n via exponent bits; n >= -1022 holds after the underflow cut
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    n64 = _mm256_slli_epi64(n64, 52);
    r = _mm256_mul_pd(r, _mm256_castsi256_pd(n64));

    const __m256d keep = _mm256_cmp_pd(xin, underflow, _CMP_GE_OQ);
    return _mm256_and_pd(r, keep);
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double gauss_sum_avx2(const double* x, const double* w, std::size_t n, double c) {
    const __m256d mc = _mm256_set1_pd(-c);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d wv = _mm256_loadu_pd(w + i);
        const __m256d e = exp_pd(_mm256_mul_pd(mc, _mm256_mul_pd(xv, xv)));
        acc = _mm256_fmadd_pd(wv, e, acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += w[i] * std::exp(-c * x[i] * x[i]);
    return hsum(acc) + tail;
}

double gauss_sum2_avx2(const double* x, const double* y, const double* w,
                       std::size_t n, double q11, double q12, double q22) {
    const __m256d a = _mm256_set1_pd(-0.5 * q11);
    const __m256d b = _mm256_set1_pd(-q12);
    const __m256d d = _mm256_set1_pd(-0.5 * q22);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d wv = _mm256_loadu_pd(w + i);
        __m256d q = _mm256_mul_pd(a, _mm256_mul_pd(xv, xv));
        q = _mm256_fmadd_pd(b, _mm256_mul_pd(xv, yv), q);
        q = _mm256_fmadd_pd(d, _mm256_mul_pd(yv, yv), q);
        acc = _mm256_fmadd_pd(wv, exp_pd(q), acc);
    }
    double tail = 0.0;
    for (; i < n; ++i) {
        const double q = q11 * x[i] * x[i] + 2.0 * q12 * x[i] * y[i] + q22 * y[i] * y[i];
        tail += w[i] * std::exp(-0.5 * q);
    }
    return hsum(acc) + tail;
}

double interp_dot_avx2(const double* vals, std::size_t n, double lo, double dx,
                       const double* x, const double* w, std::size_t m) {
    const double hi = lo + dx * static_cast<double>(n - 1);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d invdx = _mm256_set1_pd(1.0 / dx);
    const __m256d kmax = _mm256_set1_pd(static_cast<double>(n - 2));
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d xv = _mm256_loadu_pd(x + j);
        const __m256d inr = _mm256_and_pd(_mm256_cmp_pd(xv, vlo, _CMP_GE_OQ),
                                          _mm256_cmp_pd(xv, vhi, _CMP_LE_OQ));
        __m256d t = _mm256_mul_pd(_mm256_sub_pd(xv, vlo), invdx);
        t = _mm256_min_pd(_mm256_max_pd(t, zero), _mm256_set1_pd(static_cast<double>(n - 1)));
        __m256d k = _mm256_floor_pd(t);
        k = _mm256_min_pd(k, kmax);
        const __m256d frac = _mm256_sub_pd(t, k);
        const __m128i idx = _mm256_cvtpd_epi32(k);
        const __m256d v0 = _mm256_i32gather_pd(vals, idx, 8);
        const __m256d v1 = _mm256_i32gather_pd(vals + 1, idx, 8);
        const __m256d val = _mm256_fmadd_pd(frac, _mm256_sub_pd(v1, v0), v0);
        const __m256d wv = _mm256_and_pd(_mm256_loadu_pd(w + j), inr);
        acc = _mm256_fmadd_pd(wv, val, acc);
    }
    double tail = 0.0;
    for (; j < m; ++j) {
        const double xj = x[j];
        if (xj < lo || xj > hi) continue;
        double t = (xj - lo) / dx;
        std::size_t k = static_cast<std::size_t>(t);
        if (k >= n - 1) {
            k = n - 2;
            t = static_cast<double>(n - 1);
        }
        const double frac = t - static_cast<double>(k);
        tail += w[j] * (vals[k] + frac * (vals[k + 1] - vals[k]));
    }
    return hsum(acc) + tail;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{gauss_sum_avx2, gauss_sum2_avx2, interp_dot_avx2};
    return k;
}

}  // namespace mde::simd
