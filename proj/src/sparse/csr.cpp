#include "krylov_gap/csr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "krylov_gap/kernels.hpp"

namespace krylov_gap {

CsrMatrix::CsrMatrix(index_t n_rows, index_t n_cols, std::vector<index_t> row_offsets,
                     std::vector<index_t> col_indices, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    if (n_rows < 0 || n_cols < 0) throw DimensionError("CsrMatrix: negative dimension");
    if (static_cast<index_t>(row_offsets_.size()) != n_rows + 1) {
        throw DimensionError("CsrMatrix: row_offsets must have n_rows+1 entries");
    }
    if (col_indices_.size() != values_.size()) {
        throw DimensionError("CsrMatrix: col_indices and values differ in length");
    }
    if (row_offsets_.front() != 0 || row_offsets_.back() != nnz()) {
        throw DimensionError("CsrMatrix: row_offsets must start at 0 and end at nnz");
    }
    for (index_t r = 0; r < n_rows; ++r) {
        const index_t b = row_offsets_[r];
        const index_t e = row_offsets_[r + 1];
        if (e < b) throw DimensionError("CsrMatrix: row_offsets decreasing at row " + std::to_string(r));
        for (index_t k = b; k < e; ++k) {
            const index_t c = col_indices_[k];
            if (c < 0 || c >= n_cols) {
                throw DimensionError("CsrMatrix: column index out of range in row " + std::to_string(r));
            }
            if (k > b && col_indices_[k - 1] >= c) {
                throw DimensionError("CsrMatrix: columns not strictly increasing in row " +
                                     std::to_string(r));
            }
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(index_t n_rows, index_t n_cols,
                                   std::vector<std::tuple<index_t, index_t, double>> triplets,
                                   bool drop_zeros) {
    for (const auto& [r, c, v] : triplets) {
        if (r < 0 || r >= n_rows || c < 0 || c >= n_cols) {
            throw DimensionError("CsrMatrix::from_triplets: entry out of range");
        }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                : std::get<1>(a) < std::get<1>(b);
    });
    std::vector<index_t> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
    std::vector<index_t> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::vector<index_t> rows;
    rows.reserve(triplets.size());
    for (const auto& [r, c, v] : triplets) {
        if (!cols.empty() && rows.back() == r && cols.back() == c) {
            vals.back() += v;
        } else {
            rows.push_back(r);
            cols.push_back(c);
            vals.push_back(v);
        }
    }
    std::vector<index_t> out_cols;
    std::vector<double> out_vals;
    out_cols.reserve(cols.size());
    out_vals.reserve(vals.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (drop_zeros && vals[k] == 0.0) continue;
        ++offsets[static_cast<std::size_t>(rows[k]) + 1];
        out_cols.push_back(cols[k]);
        out_vals.push_back(vals[k]);
    }
    for (index_t r = 0; r < n_rows; ++r) offsets[r + 1] += offsets[r];
    return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(out_cols), std::move(out_vals));
}

CsrMatrix CsrMatrix::identity(index_t n) {
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> diag) {
    const auto n = static_cast<index_t>(diag.size());
    std::vector<index_t> offsets(diag.size() + 1);
    std::vector<index_t> cols(diag.size());
    for (index_t i = 0; i <= n; ++i) offsets[i] = i;
    for (index_t i = 0; i < n; ++i) cols[i] = i;
    return CsrMatrix(n, n, std::move(offsets), std::move(cols),
                     std::vector<double>(diag.begin(), diag.end()));
}

std::span<const index_t> CsrMatrix::row_cols(index_t row) const {
    const auto b = static_cast<std::size_t>(row_offsets_[row]);
    const auto e = static_cast<std::size_t>(row_offsets_[row + 1]);
    return std::span<const index_t>(col_indices_).subspan(b, e - b);
}

std::span<const double> CsrMatrix::row_values(index_t row) const {
    const auto b = static_cast<std::size_t>(row_offsets_[row]);
    const auto e = static_cast<std::size_t>(row_offsets_[row + 1]);
    return std::span<const double>(values_).subspan(b, e - b);
}

bool CsrMatrix::contains(index_t row, index_t col) const {
    const auto cols = row_cols(row);
    return std::binary_search(cols.begin(), cols.end(), col);
}

double CsrMatrix::at(index_t row, index_t col) const {
    const auto cols = row_cols(row);
    const auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return 0.0;
    return row_values(row)[static_cast<std::size_t>(it - cols.begin())];
}

CsrMatrix CsrMatrix::transpose() const {
    std::vector<index_t> offsets(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (index_t c : col_indices_) ++offsets[static_cast<std::size_t>(c) + 1];
    for (index_t c = 0; c < n_cols_; ++c) offsets[c + 1] += offsets[c];
    std::vector<index_t> cursor(offsets.begin(), offsets.end() - 1);
    std::vector<index_t> cols(col_indices_.size());
    std::vector<double> vals(values_.size());
    for (index_t r = 0; r < n_rows_; ++r) {
        for (index_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const index_t dst = cursor[col_indices_[k]]++;
            cols[dst] = r;
            vals[dst] = values_[k];
        }
    }
    return CsrMatrix(n_cols_, n_rows_, std::move(offsets), std::move(cols), std::move(vals));
}

void spmv_into(const CsrMatrix& a, std::span<const double> v, std::span<double> out) {
    require_same_size(static_cast<std::size_t>(a.n_cols()), v.size(), "spmv");
    require_same_size(static_cast<std::size_t>(a.n_rows()), out.size(), "spmv");
    kernels::csr_spmv(static_cast<std::size_t>(a.n_rows()), a.row_offsets().data(),
                      a.col_indices().data(), a.values().data(), v, out);
}

Vector spmv(const CsrMatrix& a, std::span<const double> v) {
    Vector out(static_cast<std::size_t>(a.n_rows()));
    spmv_into(a, v, out);
    return out;
}

double dot(std::span<const double> u, std::span<const double> v) { return kernels::dot(u, v); }

Vector axpy(double alpha, std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "axpy");
    Vector out(x.size());
    kernels::add_scaled(y, alpha, x, out);
    return out;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

CsrMatrix scale_matrix(const CsrMatrix& a, double s) {
    if (s == 0.0) throw ConfigError("scale_matrix: scale factor must be nonzero");
    CsrMatrix out = a;
    auto& vals = out.mutable_values();
    kernels::scale(s, vals, vals);
    return out;
}

index_t max_row_nnz(const CsrMatrix& a) {
    index_t best = 0;
    for (index_t r = 0; r < a.n_rows(); ++r) {
        best = std::max(best, a.row_offsets()[r + 1] - a.row_offsets()[r]);
    }
    return best;
}

bool has_symmetric_pattern(const CsrMatrix& a) {
    if (!a.square()) return false;
    const CsrMatrix t = a.transpose();
    return t.row_offsets() == a.row_offsets() && t.col_indices() == a.col_indices();
}

bool is_symmetric(const CsrMatrix& a) {
    if (!a.square()) return false;
    return a.transpose() == a;
}

Vector power_iteration_seed(index_t n) {
    Vector v(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    if (n > 0) v[0] += 1e-3;
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    return v;
}

NormEstimate estimate_two_norm(const CsrMatrix& a, double tol, index_t max_iters) {
    if (!a.square()) throw DimensionError("estimate_two_norm: matrix must be square");
    const CsrMatrix at = a.transpose();
    Vector v = power_iteration_seed(a.n_rows());
    Vector av(v.size());
    Vector atav(v.size());
    NormEstimate est;
    double lambda_prev = 0.0;
    for (index_t it = 1; it <= max_iters; ++it) {
        spmv_into(a, v, av);
        const double lambda = kernels::dot(av, av);
        est.value = std::sqrt(lambda);
        est.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_prev) < tol * lambda) {
            est.converged = true;
            break;
        }
        lambda_prev = lambda;
        spmv_into(at, av, atav);
        const double n = norm2(atav);
        if (n == 0.0) {
            est.converged = true;
            break;
        }
        kernels::scale(1.0 / n, atav, v);
    }
    return est;
}

}  // namespace krylov_gap
