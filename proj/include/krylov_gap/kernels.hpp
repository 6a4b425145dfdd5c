#pragma once

// Elementwise vector kernels with scalar reference implementations and SIMD
// variants selected at run time.
//
// Every SIMD variant performs the same IEEE operations per element, in the same
// order, as the scalar reference (no FMA, no reassociation), so the results are
// bitwise identical. Reductions (dot products) have no SIMD variant: vectorizing
// them would reorder the accumulation. The SpMV variant vectorizes across rows
// and keeps each row's accumulation sequential.

#include <cstddef>
#include <span>
#include <string_view>

#include "krylov_gap/common.hpp"

namespace krylov_gap::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b);

/// Compiled in and supported by the running CPU.
bool backend_supported(Backend b);

/// Best supported backend, or the one named by KRYLOV_GAP_SIMD
/// (scalar|avx2|neon|auto) when that variable is set.
Backend default_backend();

Backend active_backend();

/// Throws ConfigError when the backend is not supported.
void set_active_backend(Backend b);

/// Restores the previous backend on destruction.
class ScopedBackend {
public:
    explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_active_backend(b); }
    ~ScopedBackend() { set_active_backend(previous_); }
    ScopedBackend(const ScopedBackend&) = delete;
    ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
    Backend previous_;
};

// Output spans may alias any input span element for element.

/// out = a + s*b
void add_scaled(std::span<const double> a, double s, std::span<const double> b,
                std::span<double> out);
/// out = a - s*b
void sub_scaled(std::span<const double> a, double s, std::span<const double> b,
                std::span<double> out);
/// out = a + s1*(b - s2*c)
void add_scaled_diff(std::span<const double> a, double s1, std::span<const double> b, double s2,
                     std::span<const double> c, std::span<double> out);
/// out = a - s1*(b - s2*c)
void sub_scaled_diff(std::span<const double> a, double s1, std::span<const double> b, double s2,
                     std::span<const double> c, std::span<double> out);
/// out = (a + s1*b) + s2*c
void add_two_scaled(std::span<const double> a, double s1, std::span<const double> b, double s2,
                    std::span<const double> c, std::span<double> out);
/// out = a - b
void sub(std::span<const double> a, std::span<const double> b, std::span<double> out);
/// out = s*a
void scale(double s, std::span<const double> a, std::span<double> out);

/// Sequential inner product; scalar on every backend.
double dot(std::span<const double> a, std::span<const double> b);

/// CSR row products: out[i] = sum_k values[k]*x[cols[k]], k over row i in order.
void csr_spmv(std::size_t n_rows, const index_t* row_offsets, const index_t* cols,
              const double* values, std::span<const double> x, std::span<double> out);

namespace detail {

struct KernelTable {
    void (*add_scaled)(std::size_t, const double*, double, const double*, double*);
    void (*sub_scaled)(std::size_t, const double*, double, const double*, double*);
    void (*add_scaled_diff)(std::size_t, const double*, double, const double*, double,
                            const double*, double*);
    void (*sub_scaled_diff)(std::size_t, const double*, double, const double*, double,
                            const double*, double*);
    void (*add_two_scaled)(std::size_t, const double*, double, const double*, double,
                           const double*, double*);
    void (*sub)(std::size_t, const double*, const double*, double*);
    void (*scale)(std::size_t, double, const double*, double*);
    void (*csr_spmv)(std::size_t, const index_t*, const index_t*, const double*, const double*,
                     double*);
};

/// Table for a backend; the backend must be compiled in.
const KernelTable& table_for(Backend b);

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif

}  // namespace detail

}  // namespace krylov_gap::kernels
