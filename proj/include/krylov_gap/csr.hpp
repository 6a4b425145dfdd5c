#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "krylov_gap/common.hpp"

namespace krylov_gap {

/// Compressed sparse row matrix in binary64.
///
/// Invariants checked on construction: row_offsets has n_rows+1 entries, starts
/// at 0, is non-decreasing and ends at nnz; column indices inside a row are
/// strictly increasing and < n_cols.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_offsets,
              std::vector<index_t> col_indices, std::vector<double> values);

    /// Builds from unordered (row, col, value) triplets; duplicates are summed.
    /// Explicit zeros are kept unless drop_zeros is set.
    static CsrMatrix from_triplets(index_t n_rows, index_t n_cols,
                                   std::vector<std::tuple<index_t, index_t, double>> triplets,
                                   bool drop_zeros = false);

    static CsrMatrix identity(index_t n);
    static CsrMatrix diagonal(std::span<const double> diag);

    index_t n_rows() const { return n_rows_; }
    index_t n_cols() const { return n_cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }
    bool square() const { return n_rows_ == n_cols_; }

    const std::vector<index_t>& row_offsets() const { return row_offsets_; }
    const std::vector<index_t>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    std::span<const index_t> row_cols(index_t row) const;
    std::span<const double> row_values(index_t row) const;

    /// Stored value at (row, col), or 0 when the position is not stored.
    double at(index_t row, index_t col) const;
    bool contains(index_t row, index_t col) const;

    CsrMatrix transpose() const;

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    index_t n_rows_ = 0;
    index_t n_cols_ = 0;
    std::vector<index_t> row_offsets_{0};
    std::vector<index_t> col_indices_;
    std::vector<double> values_;
};

/// y = A v. Each row is accumulated in stored column order, left to right.
Vector spmv(const CsrMatrix& a, std::span<const double> v);
void spmv_into(const CsrMatrix& a, std::span<const double> v, std::span<double> out);

/// Sequential left-to-right inner product.
double dot(std::span<const double> u, std::span<const double> v);

/// Elementwise fl(alpha * x[i] + y[i]).
Vector axpy(double alpha, std::span<const double> x, std::span<const double> y);

/// sqrt(dot(v, v)).
double norm2(std::span<const double> v);

/// All stored values multiplied by s. Throws ConfigError when s == 0.
CsrMatrix scale_matrix(const CsrMatrix& a, double s);

/// Maximum number of stored entries in any row.
index_t max_row_nnz(const CsrMatrix& a);

/// True when the sparsity pattern is symmetric (values may differ).
bool has_symmetric_pattern(const CsrMatrix& a);

/// True when A equals its transpose bitwise.
bool is_symmetric(const CsrMatrix& a);

struct NormEstimate {
    double value = 0.0;
    index_t iterations = 0;
    bool converged = false;
};

inline constexpr double kPowerTol = 1e-8;
inline constexpr index_t kPowerMaxIters = 500;

/// Power iteration on A^T A from a fixed seed (normalized ones, first entry
/// perturbed by +1e-3). Returns sqrt of the dominant eigenvalue estimate.
NormEstimate estimate_two_norm(const CsrMatrix& a, double tol = kPowerTol,
                               index_t max_iters = kPowerMaxIters);

/// Deterministic seed vector shared by the power iterations.
Vector power_iteration_seed(index_t n);

}  // namespace krylov_gap
