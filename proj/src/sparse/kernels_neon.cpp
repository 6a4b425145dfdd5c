// NEON variants for AArch64, 2 doubles per register. SpMV falls back to the
// scalar kernel (no gather instruction).

#include "krylov_gap/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace krylov_gap::kernels::detail {
namespace {

void add_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vmulq_f64(vs, vld1q_f64(b + i));
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), t));
    }
    for (; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] + t;
    }
}

void sub_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t t = vmulq_f64(vs, vld1q_f64(b + i));
        vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), t));
    }
    for (; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] - t;
    }
}

void add_scaled_diff(std::size_t n, const double* a, double s1, const double* b, double s2,
                     const double* c, double* out) {
    const float64x2_t v1 = vdupq_n_f64(s1);
    const float64x2_t v2 = vdupq_n_f64(s2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(b + i), vmulq_f64(v2, vld1q_f64(c + i)));
        vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vmulq_f64(v1, d)));
    }
    for (; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] + e;
    }
}

void sub_scaled_diff(std::size_t n, const double* a, double s1, const double* b, double s2,
                     const double* c, double* out) {
    const float64x2_t v1 = vdupq_n_f64(s1);
    const float64x2_t v2 = vdupq_n_f64(s2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(b + i), vmulq_f64(v2, vld1q_f64(c + i)));
        vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vmulq_f64(v1, d)));
    }
    for (; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] - e;
    }
}

void add_two_scaled(std::size_t n, const double* a, double s1, const double* b, double s2,
                    const double* c, double* out) {
    const float64x2_t v1 = vdupq_n_f64(s1);
    const float64x2_t v2 = vdupq_n_f64(s2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t p = vaddq_f64(vld1q_f64(a + i), vmulq_f64(v1, vld1q_f64(b + i)));
        vst1q_f64(out + i, vaddq_f64(p, vmulq_f64(v2, vld1q_f64(c + i))));
    }
    for (; i < n; ++i) {
        const double t1 = s1 * b[i];
        const double p = a[i] + t1;
        const double t2 = s2 * c[i];
        out[i] = p + t2;
    }
}

void sub(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void scale(std::size_t n, double s, const double* a, double* out) {
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vs, vld1q_f64(a + i)));
    for (; i < n; ++i) out[i] = s * a[i];
}

}  // namespace

const KernelTable& neon_table() {
    static const KernelTable table{add_scaled,     sub_scaled, add_scaled_diff,
                                   sub_scaled_diff, add_two_scaled, sub,
                                   scale,          scalar_table().csr_spmv};
    return table;
}

}  // namespace krylov_gap::kernels::detail

#endif
