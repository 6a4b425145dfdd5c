#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "krylov_gap/precond.hpp"
#include "krylov_gap/stencil.hpp"
#include "test_util.hpp"

namespace kg = krylov_gap;
using kg::index_t;
using kg::Vector;

namespace {

/// Textbook IC(0) on a dense copy: L_ij over the lower pattern of A, sums in ascending k.
std::vector<double> dense_ic0(const kg::CsrMatrix& a) {
    const auto n = static_cast<std::size_t>(a.n_rows());
    const auto d = kg::testing::to_dense(a);
    auto in_pattern = [&](std::size_t i, std::size_t j) {
        return a.contains(static_cast<index_t>(i), static_cast<index_t>(j));
    };
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            if (!in_pattern(i, j)) continue;
            double s = d[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                if (in_pattern(i, k) && in_pattern(j, k)) s = s - l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = (i == j) ? std::sqrt(s) : s / l[j * n + j];
        }
    }
    return l;
}

Eigen::MatrixXd to_eigen(const std::vector<double>& d, std::size_t n) {
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = d[i * n + j];
    }
    return m;
}

}  // namespace

TEST(Icc0, MatchesDenseOracleBitwise) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP3, kg::ProblemId::TP4, kg::ProblemId::TP5}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = 7;
        spec.ny = 6;
        if (spec.nz > 1) spec.nz = 4;
        const auto a = kg::stencil_matrix(spec);
        const auto f = kg::icc0_factor(a);
        EXPECT_EQ(f.shifted_pivots, 0);
        const auto got = kg::testing::to_dense(f.lower);
        EXPECT_TRUE(kg::testing::bitwise_equal(got, dense_ic0(a))) << kg::problem_name(id);
        EXPECT_EQ(f.upper, f.lower.transpose());
    }
}

TEST(Icc0, PatternIsLowerOfA) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP4, 6, 6, 1, 0.0, true});
    const auto f = kg::icc0_factor(a);
    index_t lower_nnz = 0;
    for (index_t i = 0; i < a.n_rows(); ++i) {
        for (index_t j : a.row_cols(i)) {
            if (j <= i) {
                ++lower_nnz;
                EXPECT_TRUE(f.lower.contains(i, j));
            }
        }
    }
    EXPECT_EQ(f.lower.nnz(), lower_nnz);
}

TEST(Icc0, TridiagonalIsExactCholesky) {
    const auto a = kg::testing::laplacian_1d(100);
    const auto f = kg::icc0_factor(a);
    const Eigen::MatrixXd l = to_eigen(kg::testing::to_dense(f.lower), 100);
    const Eigen::MatrixXd da = to_eigen(kg::testing::to_dense(a), 100);
    EXPECT_LE((da - l * l.transpose()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Icc0, ApplyMatchesDenseTriangularSolves) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 9, 8, 1, 0.0, true});
    const auto m = kg::Preconditioner::icc0(a);
    const auto n = static_cast<std::size_t>(a.n_rows());
    const Eigen::MatrixXd l = to_eigen(kg::testing::to_dense(m.factor()->lower), n);
    const Vector v = kg::testing::random_vector(n, 4);
    const Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(ev);
    const Eigen::VectorXd z = l.transpose().triangularView<Eigen::Upper>().solve(y);
    const Vector got = kg::apply_preconditioner(m, v);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], z(static_cast<Eigen::Index>(i)), 1e-12 * z.norm());
    // Apply inverts L L^T up to rounding.
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(got.data(), static_cast<Eigen::Index>(n));
    EXPECT_LE((l * (l.transpose() * g) - ev).norm(), 1e-12 * ev.norm());
}

TEST(Icc0, IdentityCopiesBitwise) {
    const auto m = kg::Preconditioner::identity(11);
    const Vector v = kg::testing::random_vector(11, 5);
    EXPECT_TRUE(kg::testing::bitwise_equal(kg::apply_preconditioner(m, v), v));
    EXPECT_EQ(m.mu_tilde(), 1);
    EXPECT_TRUE(m.is_identity());
}

TEST(Icc0, MuTilde) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 6, 6, 1, 0.0, true});
    EXPECT_EQ(kg::Preconditioner::icc0(a).mu_tilde(), 5);
    const auto b = kg::stencil_matrix({kg::ProblemId::TP4, 6, 6, 1, 0.0, true});
    EXPECT_EQ(kg::Preconditioner::icc0(b).mu_tilde(), 9);
}

TEST(Icc0, NonPositivePivotIsShiftedAndFlagged) {
    // [[1, 2], [2, 1]]: second pivot 1 - 4 = -3 becomes 3.
    const auto a = kg::CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
    const auto f = kg::icc0_factor(a);
    EXPECT_EQ(f.shifted_pivots, 1);
    EXPECT_FALSE(f.diag_shift_applied[0]);
    EXPECT_TRUE(f.diag_shift_applied[1]);
    EXPECT_EQ(f.lower.at(1, 1), std::sqrt(3.0));
    const auto z = kg::CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    EXPECT_EQ(kg::icc0_factor(z).lower.at(1, 1), std::sqrt(1e-8));
}

TEST(Icc0, Errors) {
    const auto missing_diag = kg::CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}});
    EXPECT_THROW(kg::icc0_factor(missing_diag), kg::ConfigError);
    const auto unsym = kg::CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
    EXPECT_THROW(kg::icc0_factor(unsym), kg::ConfigError);
    const auto upper = kg::CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}});
    EXPECT_THROW(kg::icc_factor_from_lower(upper), kg::ConfigError);
    const auto m = kg::Preconditioner::identity(3);
    Vector out(2);
    EXPECT_THROW(m.apply(Vector(3), out), kg::DimensionError);
}

TEST(Icc0, ExplicitFactorExamples) {
    const std::vector<double> two(5, 2.0);
    const kg::Preconditioner m(kg::icc_factor_from_lower(kg::CsrMatrix::diagonal(two)));
    EXPECT_NEAR(kg::estimate_preconditioner_norm(m).value, 0.25, 0.25 * 1e-6);
    const std::vector<double> ones(5, 1.0);
    const kg::Preconditioner id(kg::icc_factor_from_lower(kg::CsrMatrix::diagonal(ones)));
    const Vector v = kg::testing::random_vector(5, 8);
    EXPECT_TRUE(kg::testing::bitwise_equal(kg::apply_preconditioner(id, v), v));
    EXPECT_NEAR(kg::estimate_preconditioner_norm(kg::Preconditioner::identity(5)).value, 1.0, 1e-6);
}

TEST(Icc0, TridiagonalSizeFour) {
    const auto a = kg::testing::laplacian_1d(4);
    const auto l = kg::testing::to_dense(kg::icc0_factor(a).lower);
    const auto d = kg::testing::to_dense(a);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += l[r * 4 + k] * l[c * 4 + k];
            EXPECT_NEAR(s, d[r * 4 + c], 1e-14) << r << "," << c;
        }
    }
}

TEST(Icc0, ApplyIsLinearToRounding) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP4, 10, 9, 1, 0.0, true});
    const auto m = kg::Preconditioner::icc0(a);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Vector u = kg::testing::random_vector(90, 100 + seed);
        const Vector v = kg::testing::random_vector(90, 200 + seed);
        Vector sum(90);
        for (std::size_t i = 0; i < 90; ++i) sum[i] = u[i] + v[i];
        const Vector mu = kg::apply_preconditioner(m, u);
        const Vector mv = kg::apply_preconditioner(m, v);
        Vector diff = kg::apply_preconditioner(m, sum);
        for (std::size_t i = 0; i < 90; ++i) diff[i] -= mu[i] + mv[i];
        EXPECT_LE(kg::norm2(diff), 1e-12 * (kg::norm2(mu) + kg::norm2(mv)));
    }
}

TEST(Icc0, SpdProblemsNeverShiftPivots) {
    for (auto id : {kg::ProblemId::TP1, kg::ProblemId::TP4}) {
        const auto a = kg::stencil_matrix({id, 30, 30, 1, 0.0, true});
        EXPECT_EQ(kg::icc0_factor(a).shifted_pivots, 0) << kg::problem_name(id);
    }
}
