// Scalar reference kernels. Operation order here defines the rounding that every
// other backend must reproduce.

#include "krylov_gap/kernels.hpp"

namespace krylov_gap::kernels::detail {
namespace {

void add_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] + t;
    }
}

void sub_scaled(std::size_t n, const double* a, double s, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s * b[i];
        out[i] = a[i] - t;
    }
}

void add_scaled_diff(std::size_t n, const double* a, double s1, const double* b, double s2,
                     const double* c, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] + e;
    }
}

void sub_scaled_diff(std::size_t n, const double* a, double s1, const double* b, double s2,
                     const double* c, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s2 * c[i];
        const double d = b[i] - t;
        const double e = s1 * d;
        out[i] = a[i] - e;
    }
}

void add_two_scaled(std::size_t n, const double* a, double s1, const double* b, double s2,
                    const double* c, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t1 = s1 * b[i];
        const double p = a[i] + t1;
        const double t2 = s2 * c[i];
        out[i] = p + t2;
    }
}

void sub(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void scale(std::size_t n, double s, const double* a, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i];
}

void csr_spmv(std::size_t n_rows, const index_t* offsets, const index_t* cols, const double* vals,
              const double* x, double* out) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double acc = 0.0;
        for (index_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            const double p = vals[k] * x[cols[k]];
            acc = acc + p;
        }
        out[r] = acc;
    }
}

constexpr KernelTable kScalar{add_scaled,     sub_scaled, add_scaled_diff, sub_scaled_diff,
                              add_two_scaled, sub,        scale,           csr_spmv};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace krylov_gap::kernels::detail
