#include "anobench/kernels.hpp"

namespace anobench::kernels {

namespace {

void sqdiff_acc_scalar(double* acc, const double* x, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c;
        acc[i] += d * d;
    }
}

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double sumsqdiff_scalar(const double* x, double c, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c;
        s += d * d;
    }
    return s;
}

void scale_shift_scalar(double* dst, const double* x, double shift,
                        double scale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = (x[i] - shift) * scale;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{sqdiff_acc_scalar, sum_scalar, sumsqdiff_scalar,
                         scale_shift_scalar, "scalar"};
    return ops;
}

}  // namespace anobench::kernels

// ---------------------------------------------------------------------------
// NEON variant. aarch64 guarantees NEON, so no runtime probe is needed; the
// lane width is 2 doubles and tails fall back to the scalar loop.
// ---------------------------------------------------------------------------
#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace anobench::kernels {

namespace {

void sqdiff_acc_neon(double* acc, const double* x, double c, std::size_t n) {
    const float64x2_t cv = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), cv);
        vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), d, d));
    }
    for (; i < n; ++i) {
        const double d = x[i] - c;
        acc[i] += d * d;
    }
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t s = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) s = vaddq_f64(s, vld1q_f64(x + i));
    double total = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    for (; i < n; ++i) total += x[i];
    return total;
}

double sumsqdiff_neon(const double* x, double c, std::size_t n) {
    const float64x2_t cv = vdupq_n_f64(c);
    float64x2_t s = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(x + i), cv);
        s = vfmaq_f64(s, d, d);
    }
    double total = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    for (; i < n; ++i) {
        const double d = x[i] - c;
        total += d * d;
    }
    return total;
}

void scale_shift_neon(double* dst, const double* x, double shift, double scale,
                      std::size_t n) {
    const float64x2_t sh = vdupq_n_f64(shift);
    const float64x2_t sc = vdupq_n_f64(scale);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(dst + i, vmulq_f64(vsubq_f64(vld1q_f64(x + i), sh), sc));
    }
    for (; i < n; ++i) dst[i] = (x[i] - shift) * scale;
}

}  // namespace

const Ops* neon_ops_impl() {
    static const Ops ops{sqdiff_acc_neon, sum_neon, sumsqdiff_neon,
                         scale_shift_neon, "neon"};
    return &ops;
}

}  // namespace anobench::kernels
#endif
