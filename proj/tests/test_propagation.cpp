#include <gtest/gtest.h>

#include <cmath>

#include "krylov_gap/stability.hpp"
#include "propagation_oracle.hpp"

namespace kg = krylov_gap;
using kg::DenseMatrix;
using kg::index_t;
using kg::Product;
using kg::testing::build_oracle;
using kg::testing::column_max;
using kg::testing::random_trace;
using Oracle = kg::testing::OracleMatrices;

namespace {

void expect_close(double got, double want, double rel, const std::string& what) {
    if (want == 0.0) {
        EXPECT_LE(std::abs(got), 1e-300) << what;
    } else {
        EXPECT_LE(kg::testing::relative_diff(got, want), rel) << what << ": " << got << " vs " << want;
    }
}

}  // namespace

TEST(Propagation, ProductColumnNormsMatchDenseOracle) {
    const index_t len = 8;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = random_trace(len, 7000 + seed);
        for (index_t i = 0; i <= len; ++i) {
            // Column i only touches beta up to i-1, so the pad value must not matter.
            const Oracle o = build_oracle(t, i + 1, 1e6);
            const auto got = kg::product_column_norms(t, i);
            for (Product p : kg::kAllProducts) {
                expect_close(got[static_cast<std::size_t>(p)], column_max(kg::testing::oracle_product(o, p), i, 0), 1e-13,
                             std::string(kg::product_name(p)) + " i=" + std::to_string(i));
            }
        }
    }
}

TEST(Propagation, RowStartRestrictsTheMaximum) {
    const auto t = random_trace(10, 42);
    const index_t i = 9;
    const Oracle o = build_oracle(t, i + 1, 0.0);
    for (index_t row_start : {0, 3, 7, 9}) {
        const auto got = kg::product_column_norms(t, i, row_start);
        for (Product p : kg::kAllProducts) {
            expect_close(got[static_cast<std::size_t>(p)], column_max(kg::testing::oracle_product(o, p), i, row_start), 1e-13,
                         std::string(kg::product_name(p)) + " row_start=" + std::to_string(row_start));
        }
    }
}

TEST(Propagation, MatricesMatchDefinitions) {
    const auto t = random_trace(7, 11);
    for (index_t upto = 0; upto < 7; ++upto) {
        const auto pm = kg::propagation_matrices(t, upto);
        const Oracle o = build_oracle(t, upto + 1, 0.0);
        const std::pair<const DenseMatrix*, const DenseMatrix*> pairs[] = {
            {&pm.A, &o.A}, {&pm.B, &o.B}, {&pm.E, &o.E}, {&pm.P, &o.P},
            {&pm.C, &o.C}, {&pm.D, &o.D}, {&pm.O, &o.O}, {&pm.U, &o.U}};
        for (const auto& [got, want] : pairs) {
            ASSERT_EQ(got->n, upto + 1);
            for (std::size_t k = 0; k < got->a.size(); ++k) {
                expect_close(got->a[k], want->a[k], 1e-15, "upto=" + std::to_string(upto));
            }
        }
    }
    EXPECT_THROW(kg::propagation_matrices(t, 7), kg::DimensionError);
}

TEST(Propagation, BruteForceBEntries) {
    const auto t = random_trace(6, 5);
    const auto pm = kg::propagation_matrices(t, 5);
    for (index_t j = 0; j < 6; ++j) {
        for (index_t k = 0; k < 6; ++k) {
            double p = k >= j ? 1.0 : 0.0;
            for (index_t m = j + 1; m <= k; ++m) p *= t.betas[m];
            EXPECT_DOUBLE_EQ(pm.B(j, k), p);
        }
    }
}

TEST(Propagation, TwoByTwoExample) {
    kg::CoefficientTrace t;
    t.push(2.0, 0.0, 0.5);
    t.push(1.0, 3.0, 0.5);
    const auto pm = kg::propagation_matrices(t, 1);
    EXPECT_EQ(pm.B(0, 0), 1.0);
    EXPECT_EQ(pm.B(0, 1), 3.0);
    EXPECT_EQ(pm.B(1, 0), 0.0);
    EXPECT_EQ(pm.B(1, 1), 1.0);
    EXPECT_EQ(pm.A(0, 1), -2.0);
    for (index_t r = 0; r < 2; ++r) {
        for (index_t c = 0; c < 2; ++c) EXPECT_EQ(pm.U(r, c), c >= r ? 1.0 : 0.0);
    }
}

TEST(Propagation, FirstColumnOnlyU) {
    const auto t = random_trace(3, 1);
    const auto got = kg::product_column_norms(t, 0);
    for (Product p : kg::kAllProducts) {
        EXPECT_EQ(got[static_cast<std::size_t>(p)], p == Product::U ? 1.0 : 0.0) << kg::product_name(p);
    }
    for (index_t i = 0; i <= 3; ++i) EXPECT_EQ(kg::product_column_norms(t, i)[0], 1.0);
}

TEST(Propagation, ZeroOmegaCollapsesToPipelinedCg) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = random_trace(8, 900 + seed, true);
        for (index_t i = 0; i <= 8; ++i) {
            const auto got = kg::product_column_norms(t, i);
            for (Product p : {Product::OU, Product::BPA, Product::UC, Product::BAC, Product::BD}) {
                EXPECT_EQ(got[static_cast<std::size_t>(p)], 0.0) << kg::product_name(p);
            }
            const auto pcg = kg::pcg_product_column_norms(t.alphas, t.betas, i);
            const Product four[] = {Product::U, Product::BA, Product::UEA, Product::BAEA};
            for (std::size_t k = 0; k < 4; ++k) {
                expect_close(got[static_cast<std::size_t>(four[k])], pcg[k], 1e-13,
                             std::string(kg::product_name(four[k])) + " i=" + std::to_string(i));
            }
        }
    }
}

TEST(Propagation, HistoryZeroesRowsAboveReplacement) {
    const auto t = random_trace(12, 77);
    const std::vector<index_t> reps{4, 9};
    const auto hist = kg::product_column_norm_history(t, reps);
    ASSERT_EQ(hist.size(), 13u);
    for (index_t i = 0; i <= 12; ++i) {
        const index_t start = i >= 9 ? 9 : (i >= 4 ? 4 : 0);
        EXPECT_EQ(hist[i], kg::product_column_norms(t, i, start)) << "i=" << i;
    }
    // Right at the replacement only row i_r survives, where the strict upper factors vanish.
    for (Product p : kg::kAllProducts) {
        if (p == Product::U) continue;
        EXPECT_EQ(hist[4][static_cast<std::size_t>(p)], p == Product::OU ? std::abs(t.omegas[3]) : 0.0);
    }
}

TEST(Propagation, UnrollMatchesMatrixExpressions) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const index_t len = 8;
        const index_t upto = len - 1;
        const auto t = random_trace(len, 3100 + seed);
        const double r0 = 1.0, s0 = 1.0, w0 = 1.0, z0 = 1.0;
        const auto g = kg::unroll_gap_system(t, r0, s0, w0, z0, upto);
        const Oracle o = build_oracle(t, upto + 1, 0.0);
        const index_t n = upto + 1;
        // Zero local errors: each Theta reduces to the initial gap in its first column.
        auto row_times = [&](const std::vector<double>& v, const DenseMatrix& m) {
            std::vector<double> out(n, 0.0);
            for (index_t c = 0; c < n; ++c) {
                for (index_t r = 0; r < n; ++r) out[c] += v[r] * m(r, c);
            }
            return out;
        };
        std::vector<double> e0(n, 0.0);
        e0[0] = 1.0;
        auto scaled = [&](double s, std::vector<double> v) {
            for (double& x : v) x *= s;
            return v;
        };
        auto plus = [](std::vector<double> a, const std::vector<double>& b) {
            for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
            return a;
        };
        const auto z = row_times(scaled(z0, e0), o.B);
        const auto w = plus(row_times(scaled(w0, e0), o.U), row_times(z, o.A));
        const auto s = plus(plus(row_times(scaled(s0, e0), o.B), row_times(w, o.E)), row_times(z, o.P));
        const auto r = plus(plus(plus(row_times(scaled(r0, e0), o.U), row_times(s, o.A)), row_times(w, o.C)),
                            row_times(z, o.D));
        for (index_t i = 0; i < n; ++i) {
            const double scale_z = std::max(1.0, std::abs(z[i]));
            EXPECT_LE(std::abs(g.z[i] - z[i]), 1e-13 * scale_z) << "z " << i;
            EXPECT_LE(std::abs(g.w[i] - w[i]), 1e-13 * std::max(1.0, std::abs(w[i]))) << "w " << i;
            EXPECT_LE(std::abs(g.s[i] - s[i]), 1e-13 * std::max(1.0, std::abs(s[i]))) << "s " << i;
            EXPECT_LE(std::abs(g.r[i] - r[i]), 1e-13 * std::max(1.0, std::abs(r[i]))) << "r " << i;
        }
    }
}

TEST(Propagation, MultiplyRejectsMismatch) {
    EXPECT_THROW(kg::multiply(DenseMatrix(2), DenseMatrix(3)), kg::DimensionError);
}
