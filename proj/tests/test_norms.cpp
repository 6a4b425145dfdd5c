#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "krylov_gap/precond.hpp"
#include "krylov_gap/stencil.hpp"
#include "test_util.hpp"

namespace kg = krylov_gap;
using kg::index_t;

namespace {

Eigen::MatrixXd dense(const kg::CsrMatrix& a) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.n_rows(), a.n_cols());
    for (index_t i = 0; i < a.n_rows(); ++i) {
        const auto c = a.row_cols(i);
        const auto v = a.row_values(i);
        for (std::size_t k = 0; k < c.size(); ++k) d(i, c[k]) = v[k];
    }
    return d;
}

double svd_norm(const Eigen::MatrixXd& d) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(d).singularValues()(0);
}

}  // namespace

TEST(Norms, Tp1MatchesSvd) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 10, 10, 1, 0.0, false});
    const auto est = kg::estimate_two_norm(a);
    EXPECT_TRUE(est.converged);
    EXPECT_LE(kg::testing::relative_diff(est.value, svd_norm(dense(a))), 1e-6);
}

TEST(Norms, NonsymmetricMatchesSvd) {
    for (auto id : {kg::ProblemId::TP2, kg::ProblemId::TP4}) {
        auto spec = kg::StencilSpec::defaults(id);
        spec.nx = spec.ny = 9;
        spec.normalize = false;
        const auto a = kg::stencil_matrix(spec);
        EXPECT_LE(kg::testing::relative_diff(kg::estimate_two_norm(a).value, svd_norm(dense(a))), 1e-6);
    }
}

TEST(Norms, IdentityAndDiagonal) {
    const auto id = kg::estimate_two_norm(kg::CsrMatrix::identity(17));
    EXPECT_EQ(id.value, 1.0);
    EXPECT_TRUE(id.converged);
    const kg::Vector d{1.0, 2.0, 3.0};
    EXPECT_NEAR(kg::estimate_two_norm(kg::CsrMatrix::diagonal(d)).value, 3.0, 3e-6);
}

TEST(Norms, PowerSeedIsDeterministicAndUnit) {
    const auto s = kg::power_iteration_seed(50);
    EXPECT_TRUE(kg::testing::bitwise_equal(s, kg::power_iteration_seed(50)));
    EXPECT_NEAR(kg::norm2(s), 1.0, 1e-15);
}

TEST(Norms, RejectsRectangular) {
    EXPECT_THROW(kg::estimate_two_norm(kg::CsrMatrix::from_triplets(2, 3, {{0, 0, 1.0}})), kg::DimensionError);
}

TEST(Norms, PreconditionerNormMatchesDenseInverse) {
    const auto a = kg::stencil_matrix({kg::ProblemId::TP1, 8, 8, 1, 0.0, true});
    const auto m = kg::Preconditioner::icc0(a);
    const Eigen::MatrixXd l = dense(m.factor()->lower);
    const Eigen::MatrixXd mm = l * l.transpose();
    const double expect = svd_norm(mm.inverse());
    EXPECT_LE(kg::testing::relative_diff(kg::estimate_preconditioner_norm(m).value, expect), 1e-6);
    EXPECT_NEAR(kg::estimate_preconditioner_norm(kg::Preconditioner::identity(5)).value, 1.0, 1e-15);
}
