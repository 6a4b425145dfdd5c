#include "krylov_gap/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace krylov_gap::kernels {
namespace {

std::atomic<const detail::KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const detail::KernelTable& current() {
    const detail::KernelTable* t = g_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        const Backend b = default_backend();
        t = &detail::table_for(b);
        g_backend.store(b, std::memory_order_relaxed);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

void check(std::size_t n, std::size_t m, const char* what) { require_same_size(n, m, what); }

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend default_backend() {
    if (const char* env = std::getenv("KRYLOV_GAP_SIMD"); env != nullptr) {
        const std::string name(env);
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (name == backend_name(b) && backend_supported(b)) return b;
        }
    }
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend active_backend() {
    current();
    return g_backend.load(std::memory_order_relaxed);
}

void set_active_backend(Backend b) {
    if (!backend_supported(b)) {
        throw ConfigError("SIMD backend not supported on this machine: " +
                          std::string(backend_name(b)));
    }
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(&detail::table_for(b), std::memory_order_release);
}

const detail::KernelTable& detail::table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: return avx2_table();
#endif
#if defined(__aarch64__)
        case Backend::neon: return neon_table();
#endif
        default: break;
    }
    throw ConfigError("SIMD backend not compiled in: " + std::string(backend_name(b)));
}

void add_scaled(std::span<const double> a, double s, std::span<const double> b,
                std::span<double> out) {
    check(a.size(), b.size(), "add_scaled");
    check(a.size(), out.size(), "add_scaled");
    current().add_scaled(a.size(), a.data(), s, b.data(), out.data());
}

void sub_scaled(std::span<const double> a, double s, std::span<const double> b,
                std::span<double> out) {
    check(a.size(), b.size(), "sub_scaled");
    check(a.size(), out.size(), "sub_scaled");
    current().sub_scaled(a.size(), a.data(), s, b.data(), out.data());
}

void add_scaled_diff(std::span<const double> a, double s1, std::span<const double> b, double s2,
                     std::span<const double> c, std::span<double> out) {
    check(a.size(), b.size(), "add_scaled_diff");
    check(a.size(), c.size(), "add_scaled_diff");
    check(a.size(), out.size(), "add_scaled_diff");
    current().add_scaled_diff(a.size(), a.data(), s1, b.data(), s2, c.data(), out.data());
}

void sub_scaled_diff(std::span<const double> a, double s1, std::span<const double> b, double s2,
                     std::span<const double> c, std::span<double> out) {
    check(a.size(), b.size(), "sub_scaled_diff");
    check(a.size(), c.size(), "sub_scaled_diff");
    check(a.size(), out.size(), "sub_scaled_diff");
    current().sub_scaled_diff(a.size(), a.data(), s1, b.data(), s2, c.data(), out.data());
}

void add_two_scaled(std::span<const double> a, double s1, std::span<const double> b, double s2,
                    std::span<const double> c, std::span<double> out) {
    check(a.size(), b.size(), "add_two_scaled");
    check(a.size(), c.size(), "add_two_scaled");
    check(a.size(), out.size(), "add_two_scaled");
    current().add_two_scaled(a.size(), a.data(), s1, b.data(), s2, c.data(), out.data());
}

void sub(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    check(a.size(), b.size(), "sub");
    check(a.size(), out.size(), "sub");
    current().sub(a.size(), a.data(), b.data(), out.data());
}

void scale(double s, std::span<const double> a, std::span<double> out) {
    check(a.size(), out.size(), "scale");
    current().scale(a.size(), s, a.data(), out.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
    check(a.size(), b.size(), "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = a[i] * b[i];
        acc = acc + p;
    }
    return acc;
}

void csr_spmv(std::size_t n_rows, const index_t* row_offsets, const index_t* cols,
              const double* values, std::span<const double> x, std::span<double> out) {
    check(n_rows, out.size(), "csr_spmv");
    current().csr_spmv(n_rows, row_offsets, cols, values, x.data(), out.data());
}

}  // namespace krylov_gap::kernels
