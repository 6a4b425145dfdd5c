#include <gtest/gtest.h>

#include <cmath>

#include "krylov_gap/csr.hpp"
#include "krylov_gap/kernels.hpp"
#include "krylov_gap/stencil.hpp"
#include "test_util.hpp"

namespace kg = krylov_gap;
namespace k = krylov_gap::kernels;
using kg::index_t;
using kg::Vector;
using kg::testing::bitwise_equal;
using kg::testing::random_vector;

// ---------------------------------------------------------------------------
// CSR construction

TEST(Csr, RejectsBadOffsets) {
    EXPECT_THROW(kg::CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), kg::DimensionError);
    EXPECT_THROW(kg::CsrMatrix(2, 2, {1, 1, 1}, {0}, {1.0}), kg::DimensionError);
    EXPECT_THROW(kg::CsrMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), kg::DimensionError);
}

TEST(Csr, RejectsUnsortedOrOutOfRangeColumns) {
    EXPECT_THROW(kg::CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), kg::DimensionError);
    EXPECT_THROW(kg::CsrMatrix(1, 3, {0, 2}, {1, 1}, {1.0, 1.0}), kg::DimensionError);
    EXPECT_THROW(kg::CsrMatrix(1, 3, {0, 1}, {3}, {1.0}), kg::DimensionError);
}

TEST(Csr, TripletsSumDuplicatesAndSortColumns) {
    auto a = kg::CsrMatrix::from_triplets(2, 3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, 0.0}});
    EXPECT_EQ(a.nnz(), 3);
    EXPECT_EQ(a.at(0, 0), 2.0);
    EXPECT_EQ(a.at(0, 2), 1.5);
    EXPECT_TRUE(a.contains(1, 1));
    auto dropped = kg::CsrMatrix::from_triplets(2, 3, {{1, 1, 0.0}, {0, 0, 1.0}}, true);
    EXPECT_FALSE(dropped.contains(1, 1));
}

TEST(Csr, TransposeRoundTrip) {
    auto a = kg::CsrMatrix::from_triplets(3, 4, {{0, 3, 1.0}, {2, 0, -2.0}, {1, 1, 5.0}, {2, 3, 7.0}});
    auto t = a.transpose();
    EXPECT_EQ(t.n_rows(), 4);
    EXPECT_EQ(t.at(3, 2), 7.0);
    EXPECT_EQ(t.transpose(), a);
}

// ---------------------------------------------------------------------------
// Basic kernels

TEST(Kernels, SpmvIdentityIsBitwiseCopy) {
    const Vector v = random_vector(37, 1);
    EXPECT_TRUE(bitwise_equal(kg::spmv(kg::CsrMatrix::identity(37), v), v));
}

TEST(Kernels, SpmvLaplacianTelescopes) {
    const Vector y = kg::spmv(kg::testing::laplacian_1d(5), Vector{1, 2, 3, 4, 5});
    EXPECT_EQ(y, (Vector{0, 0, 0, 0, 6}));
}

TEST(Kernels, SpmvDimensionMismatch) {
    EXPECT_THROW(kg::spmv(kg::CsrMatrix::identity(3), Vector{1, 2}), kg::DimensionError);
}

TEST(Kernels, DotExamples) {
    EXPECT_EQ(kg::dot(Vector{1, 0, 0}, Vector{1, 0, 0}), 1.0);
    EXPECT_EQ(kg::dot(Vector{1, 0, 0}, Vector{0, 1, 0}), 0.0);
    EXPECT_EQ(kg::dot(Vector{1, 1, 1, 1}, Vector{1, 2, 3, 4}), 10.0);
    EXPECT_THROW(kg::dot(Vector{1}, Vector{1, 2}), kg::DimensionError);
}

TEST(Kernels, DotIsSequentialLeftToRight) {
    // (1e16 + 1) - 1e16 is 0 sequentially but 1 under pairwise summation of the tail.
    const Vector a{1e16, 1.0, -1e16, 1.0};
    const Vector ones(4, 1.0);
    EXPECT_EQ(kg::dot(a, ones), ((1e16 + 1.0) + -1e16) + 1.0);
}

TEST(Kernels, AxpyExamples) {
    const Vector x = random_vector(9, 2);
    const Vector y = random_vector(9, 3);
    EXPECT_TRUE(bitwise_equal(kg::axpy(0.0, x, y), y));
    EXPECT_TRUE(bitwise_equal(kg::axpy(1.0, x, Vector(9, 0.0)), x));
    for (double v : kg::axpy(-1.0, x, x)) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(kg::axpy(1.0, x, Vector(3)), kg::DimensionError);
}

TEST(Kernels, Norm2Examples) {
    EXPECT_EQ(kg::norm2(Vector(4, 0.0)), 0.0);
    EXPECT_EQ(kg::norm2(Vector{0, 1, 0}), 1.0);
    EXPECT_EQ(kg::norm2(Vector{3, 4}), 5.0);
}

TEST(Kernels, ScaleMatrix) {
    auto a = kg::stencil_matrix({kg::ProblemId::TP4, 5, 5, 1, 0.0, false});
    EXPECT_EQ(kg::scale_matrix(a, 1.0), a);
    auto back = kg::scale_matrix(kg::scale_matrix(a, 2.0), 0.5);
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        EXPECT_LE(std::abs(back.values()[i] - a.values()[i]),
                  std::nextafter(std::abs(a.values()[i]), HUGE_VAL) - std::abs(a.values()[i]));
    }
    const Vector two(3, 2.0);
    EXPECT_EQ(kg::scale_matrix(kg::CsrMatrix::diagonal(two), 0.5), kg::CsrMatrix::identity(3));
    EXPECT_THROW(kg::scale_matrix(a, 0.0), kg::ConfigError);
}

TEST(Kernels, MaxRowNnz) {
    EXPECT_EQ(kg::max_row_nnz(kg::CsrMatrix::identity(4)), 1);
    EXPECT_EQ(kg::max_row_nnz(kg::stencil_matrix(kg::StencilSpec::defaults(kg::ProblemId::TP1))), 5);
    EXPECT_EQ(kg::max_row_nnz(kg::stencil_matrix({kg::ProblemId::TP4, 10, 10, 1, 0.0, false})), 9);
}

// ---------------------------------------------------------------------------
// SIMD variants against the scalar reference

class SimdBitwise : public ::testing::TestWithParam<std::size_t> {};

template <class F>
void compare_backends(F run) {
    if (!k::backend_supported(k::Backend::avx2) && !k::backend_supported(k::Backend::neon)) {
        GTEST_SKIP() << "no SIMD backend on this CPU";
    }
    const k::Backend simd = k::backend_supported(k::Backend::avx2) ? k::Backend::avx2 : k::Backend::neon;
    Vector ref;
    Vector got;
    {
        k::ScopedBackend s(k::Backend::scalar);
        ref = run();
    }
    {
        k::ScopedBackend s(simd);
        got = run();
    }
    EXPECT_TRUE(bitwise_equal(ref, got));
}

TEST_P(SimdBitwise, ElementwiseKernels) {
    const std::size_t n = GetParam();
    const Vector a = random_vector(n, 10 + n, -1e3, 1e3);
    const Vector b = random_vector(n, 20 + n, -1.0, 1.0);
    const Vector c = random_vector(n, 30 + n, -1e-3, 1e-3);
    const double s1 = 0.7390851332151607;
    const double s2 = -1.0 / 3.0;
    compare_backends([&] { Vector o(n); k::add_scaled(a, s1, b, o); return o; });
    compare_backends([&] { Vector o(n); k::sub_scaled(a, s1, b, o); return o; });
    compare_backends([&] { Vector o(n); k::add_scaled_diff(a, s1, b, s2, c, o); return o; });
    compare_backends([&] { Vector o(n); k::sub_scaled_diff(a, s1, b, s2, c, o); return o; });
    compare_backends([&] { Vector o(n); k::add_two_scaled(a, s1, b, s2, c, o); return o; });
    compare_backends([&] { Vector o(n); k::sub(a, b, o); return o; });
    compare_backends([&] { Vector o(n); k::scale(s2, a, o); return o; });
}

TEST_P(SimdBitwise, AliasedOutput) {
    const std::size_t n = GetParam();
    const Vector a0 = random_vector(n, 40 + n);
    const Vector b = random_vector(n, 50 + n);
    const Vector c = random_vector(n, 60 + n);
    compare_backends([&] { Vector a = a0; k::add_scaled_diff(a, 0.3, b, 1.7, c, a); return a; });
    compare_backends([&] { Vector a = a0; k::add_scaled(b, 0.3, a, a); return a; });
}

TEST_P(SimdBitwise, CsrSpmv) {
    const std::size_t n = GetParam();
    const index_t side = std::max<index_t>(2, static_cast<index_t>(std::sqrt(static_cast<double>(n))) + 1);
    const auto a = kg::stencil_matrix({kg::ProblemId::TP4, side, side, 1, 0.0, true});
    const Vector x = random_vector(static_cast<std::size_t>(a.n_cols()), 70 + n);
    compare_backends([&] { return kg::spmv(a, x); });
}

INSTANTIATE_TEST_SUITE_P(Lengths, SimdBitwise, ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 9, 31, 64, 1001));

TEST(Kernels, DotIsBackendIndependent) {
    const Vector a = random_vector(1003, 5);
    const Vector b = random_vector(1003, 6);
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ref += a[i] * b[i];
    for (auto backend : {k::Backend::scalar, k::Backend::avx2, k::Backend::neon}) {
        if (!k::backend_supported(backend)) continue;
        k::ScopedBackend s(backend);
        EXPECT_EQ(k::dot(a, b), ref);
    }
}

TEST(Kernels, UnsupportedBackendThrows) {
#if defined(__x86_64__)
    EXPECT_THROW(k::set_active_backend(k::Backend::neon), kg::ConfigError);
#else
    EXPECT_THROW(k::set_active_backend(k::Backend::avx2), kg::ConfigError);
#endif
}

TEST(Kernels, RepeatedCallsAreDeterministic) {
    const auto a = kg::stencil_matrix(kg::StencilSpec{kg::ProblemId::TP5, 6, 6, 6, 1e-2, true});
    const Vector x = random_vector(216, 9);
    EXPECT_TRUE(bitwise_equal(kg::spmv(a, x), kg::spmv(a, x)));
    EXPECT_EQ(kg::dot(x, x), kg::dot(x, x));
}

// ---------------------------------------------------------------------------
// Stencil problems

TEST(Stencil, Tp1Size) {
    EXPECT_EQ(kg::StencilSpec::defaults(kg::ProblemId::TP1).size(), 40000);
    EXPECT_EQ(kg::stencil_matrix(kg::StencilSpec::defaults(kg::ProblemId::TP1)).n_rows(), 40000);
}

TEST(Stencil, Tp1RowSums) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 7, 6, 1, 0.0, false});
    const Vector y = kg::spmv(a, Vector(42, 1.0));
    for (index_t iy = 0; iy < 6; ++iy) {
        for (index_t ix = 0; ix < 7; ++ix) {
            const bool interior = ix > 0 && ix < 6 && iy > 0 && iy < 5;
            const double v = y[static_cast<std::size_t>(ix + 7 * iy)];
            if (interior) {
                EXPECT_EQ(v, 0.0);
            } else {
                EXPECT_GT(v, 0.0);
            }
        }
    }
}

TEST(Stencil, SymmetricProblemsAreBitwiseSymmetric) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP3, kg::ProblemId::TP4, kg::ProblemId::TP5}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = spec.ny = 9;
        if (spec.nz > 1) spec.nz = 5;
        EXPECT_TRUE(kg::is_symmetric(kg::stencil_matrix(spec))) << kg::problem_name(id);
    }
}

TEST(Stencil, Tp2BruteForce) {
    const double eps = 1e-3;
    const index_t nx = 4;
    const index_t n = 16;
    std::vector<double> dense(n * n, 0.0);
    for (index_t iy = 0; iy < nx; ++iy) {
        for (index_t ix = 0; ix < nx; ++ix) {
            const index_t p = ix + nx * iy;
            dense[p * n + p] = 4.0;
            if (ix > 0) dense[p * n + p - 1] = -1.0;
            if (iy > 0) dense[p * n + p - nx] = -1.0;
            if (ix + 1 < nx) dense[p * n + p + 1] = -1.0 + eps;
            if (iy + 1 < nx) dense[p * n + p + nx] = -1.0 + eps;
        }
    }
    const auto a = kg::stencil_matrix({kg::ProblemId::TP2, nx, nx, 1, eps, false});
    EXPECT_EQ(kg::testing::to_dense(a), dense);
    double asym = 0.0;
    for (index_t r = 0; r < n; ++r) {
        for (index_t c = 0; c < n; ++c) asym = std::max(asym, std::abs(dense[r * n + c] - dense[c * n + r]));
    }
    EXPECT_NEAR(asym, 1e-3, 1e-15);
    EXPECT_FALSE(kg::is_symmetric(a));
    EXPECT_TRUE(kg::has_symmetric_pattern(a));
}

TEST(Stencil, SpmvMatchesDenseOracleBitwise) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP2, kg::ProblemId::TP3, kg::ProblemId::TP4,
                    kg::ProblemId::TP5}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = 8;
        spec.ny = 7;
        if (spec.nz > 1) spec.nz = 3;
        const auto a = kg::stencil_matrix(spec);
        const auto d = kg::testing::to_dense(a);
        const Vector v = random_vector(static_cast<std::size_t>(a.n_cols()), 11);
        const Vector y = kg::spmv(a, v);
        const auto n = static_cast<std::size_t>(a.n_rows());
        for (std::size_t r = 0; r < n; ++r) {
            // Increasing column order over stored entries, skipping structural zeros.
            double acc = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                if (a.contains(static_cast<index_t>(r), static_cast<index_t>(c))) acc += d[r * n + c] * v[c];
            }
            EXPECT_EQ(std::bit_cast<std::uint64_t>(acc), std::bit_cast<std::uint64_t>(y[r]));
        }
    }
}

TEST(Stencil, RandomizedSymmetryCheck) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP3, kg::ProblemId::TP4, kg::ProblemId::TP5}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = spec.ny = 12;
        if (spec.nz > 1) spec.nz = 6;
        const auto a = kg::stencil_matrix(spec);
        const auto n = static_cast<std::size_t>(a.n_rows());
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Vector v = random_vector(n, 100 + seed);
            const Vector w = random_vector(n, 200 + seed);
            const double lhs = kg::dot(kg::spmv(a, v), w);
            const double rhs = kg::dot(v, kg::spmv(a, w));
            EXPECT_LE(std::abs(lhs - rhs), 1e-14 * kg::norm2(v) * kg::norm2(w));
        }
    }
}

TEST(Stencil, NormalizedNormIsOne) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP2, kg::ProblemId::TP4, kg::ProblemId::TP5}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = spec.ny = 16;
        if (spec.nz > 1) spec.nz = 8;
        const auto est = kg::estimate_two_norm(kg::stencil_matrix(spec));
        EXPECT_NEAR(est.value, 1.0, 10 * kg::kPowerTol) << kg::problem_name(id);
    }
}

TEST(Stencil, IgnoresUnusedParameters) {
    kg::StencilSpec s{kg::ProblemId::TP1, 5, 5, 99, 0.5, false};
    EXPECT_EQ(kg::stencil_matrix(s), kg::stencil_matrix({kg::ProblemId::TP1, 5, 5, 1, 0.0, false}));
}

TEST(Stencil, RejectsBadSpecs) {
    EXPECT_THROW(kg::stencil_matrix({kg::ProblemId::TP1, 1, 5, 1, 0.0, false}), kg::ConfigError);
    EXPECT_THROW(kg::stencil_matrix({kg::ProblemId::TP5, 4, 4, 1, 1e-2, false}), kg::ConfigError);
    EXPECT_THROW(kg::stencil_matrix({kg::ProblemId::TP2, 4, 4, 1, 1.5, false}), kg::ConfigError);
    EXPECT_THROW(kg::parse_problem_id("TP6"), kg::ConfigError);
    EXPECT_EQ(kg::parse_problem_id("tp3"), kg::ProblemId::TP3);
}

TEST(Stencil, RegistryMatchesTable) {
    EXPECT_EQ(kg::StencilSpec::defaults(kg::ProblemId::TP2).size(), 1000000);
    EXPECT_EQ(kg::StencilSpec::defaults(kg::ProblemId::TP5).size(), 125000);
    EXPECT_FALSE(kg::problem_info(kg::ProblemId::TP2).icc0_by_default);
    EXPECT_TRUE(kg::problem_info(kg::ProblemId::TP1).icc0_by_default);
    EXPECT_EQ(kg::problem_info(kg::ProblemId::TP5).epsilon.value(), 1e-2);
    EXPECT_EQ(kg::problem_info(kg::ProblemId::TP3).epsilon.value(), 5e-4);
}

TEST(Stencil, ManufacturedRhs) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 4, 4, 1, 0.0, false});
    const Vector b = kg::manufactured_rhs(a);
    EXPECT_TRUE(bitwise_equal(b, kg::spmv(a, Vector(16, 0.25))));
}
