// AVX2 variants, 4 doubles per lane group. Functions carry the avx2 target
// attribute so the rest of the library stays baseline x86-64. FMA is never
// enabled here: mul and add are separate instructions, matching the scalar order.

#include "krylov_gap/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#define KG_AVX2 __attribute__((target("avx2")))

namespace krylov_gap::kernels::detail {
namespace {

KG_AVX2 void add_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(vs, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), t));
    }
    for (; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] + t;
    }
}

KG_AVX2 void sub_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(vs, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), t));
    }
    for (; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] - t;
    }
}

KG_AVX2 void add_scaled_diff(std::size_t n, const double* a, double s1, const double* b,
                             double s2, const double* c, double* out) {
    const __m256d v1 = _mm256_set1_pd(s1);
    const __m256d v2 = _mm256_set1_pd(s2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(v2, _mm256_loadu_pd(c + i));
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), t);
        const __m256d e = _mm256_mul_pd(v1, d);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), e));
    }
    for (; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] + e;
    }
}

KG_AVX2 void sub_scaled_diff(std::size_t n, const double* a, double s1, const double* b,
                             double s2, const double* c, double* out) {
    const __m256d v1 = _mm256_set1_pd(s1);
    const __m256d v2 = _mm256_set1_pd(s2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(v2, _mm256_loadu_pd(c + i));
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), t);
        const __m256d e = _mm256_mul_pd(v1, d);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), e));
    }
    for (; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] - e;
    }
}

KG_AVX2 void add_two_scaled(std::size_t n, const double* a, double s1, const double* b, double s2,
                            const double* c, double* out) {
    const __m256d v1 = _mm256_set1_pd(s1);
    const __m256d v2 = _mm256_set1_pd(s2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t1 = _mm256_mul_pd(v1, _mm256_loadu_pd(b + i));
        const __m256d p = _mm256_add_pd(_mm256_loadu_pd(a + i), t1);
        const __m256d t2 = _mm256_mul_pd(v2, _mm256_loadu_pd(c + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(p, t2));
    }
    for (; i < n; ++i) {
        const double t1 = s1 * b[i];
        const double p = a[i] + t1;
        const double t2 = s2 * c[i];
        out[i] = p + t2;
    }
}

KG_AVX2 void sub(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

KG_AVX2 void scale(std::size_t n, double s, const double* a, double* out) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) out[i] = s * a[i];
}

// Four rows per step, one row per lane. Lane j walks its own row in stored
// order; lanes whose row is exhausted keep their accumulator through a blend,
// so every row sees exactly the scalar sequence acc = acc + v*x.
KG_AVX2 void csr_spmv(std::size_t n_rows, const index_t* offsets, const index_t* cols,
                      const double* vals, const double* x, double* out) {
    static_assert(sizeof(index_t) == sizeof(long long));
    std::size_t r = 0;
    for (; r + 4 <= n_rows; r += 4) {
        const __m256i begin = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(offsets + r));
        const __m256i end = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(offsets + r + 1));
        const __m256i len = _mm256_sub_epi64(end, begin);
        index_t max_len = 0;
        for (int j = 0; j < 4; ++j) {
            const index_t l = offsets[r + j + 1] - offsets[r + j];
            if (l > max_len) max_len = l;
        }
        __m256d acc = _mm256_setzero_pd();
        for (index_t k = 0; k < max_len; ++k) {
            const __m256i kk = _mm256_set1_epi64x(k);
            const __m256i active = _mm256_cmpgt_epi64(len, kk);
            const __m256d mask = _mm256_castsi256_pd(active);
            const __m256i pos = _mm256_add_epi64(begin, kk);
            const __m256d v = _mm256_mask_i64gather_pd(_mm256_setzero_pd(), vals, pos, mask, 8);
            const __m256i col = _mm256_mask_i64gather_epi64(
                _mm256_setzero_si256(), reinterpret_cast<const long long*>(cols), pos, active, 8);
            const __m256d xv = _mm256_mask_i64gather_pd(_mm256_setzero_pd(), x, col, mask, 8);
            const __m256d next = _mm256_add_pd(acc, _mm256_mul_pd(v, xv));
            acc = _mm256_blendv_pd(acc, next, mask);
        }
        _mm256_storeu_pd(out + r, acc);
    }
    for (; r < n_rows; ++r) {
        double acc = 0.0;
        for (index_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            const double p = vals[k] * x[cols[k]];
            acc = acc + p;
        }
        out[r] = acc;
    }
}

constexpr KernelTable kAvx2{add_scaled,     sub_scaled, add_scaled_diff, sub_scaled_diff,
                            add_two_scaled, sub,        scale,           csr_spmv};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace krylov_gap::kernels::detail

#endif
