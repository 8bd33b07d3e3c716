// AVX2+FMA kernel variants; 4 doubles per lane, scalar tail loops. This
// translation unit is the only one built with -mavx2 -mfma, and it is only
// entered after a runtime cpuid check in kernels_dispatch.cpp.

#include <immintrin.h>

#include "anobench/kernels.hpp"

namespace anobench::kernels {

namespace {

void sqdiff_acc_avx2(double* acc, const double* x, double c, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), cv);
        const __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(d, d, a));
    }
    for (; i < n; ++i) {
        const double d = x[i] - c;
        acc[i] += d * d;
    }
}

double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) s = _mm256_add_pd(s, _mm256_loadu_pd(x + i));
    double total = horizontal_sum(s);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sumsqdiff_avx2(const double* x, double c, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    __m256d s = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), cv);
        s = _mm256_fmadd_pd(d, d, s);
    }
    double total = horizontal_sum(s);
    for (; i < n; ++i) {
        const double d = x[i] - c;
        total += d * d;
    }
    return total;
}

void scale_shift_avx2(double* dst, const double* x, double shift, double scale,
                      std::size_t n) {
    const __m256d sh = _mm256_set1_pd(shift);
    const __m256d sc = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), sh);
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(d, sc));
    }
    for (; i < n; ++i) dst[i] = (x[i] - shift) * scale;
}

}  // namespace

const Ops* avx2_ops_impl() {
    static const Ops ops{sqdiff_acc_avx2, sum_avx2, sumsqdiff_avx2,
                         scale_shift_avx2, "avx2"};
    return &ops;
}

}  // namespace anobench::kernels
