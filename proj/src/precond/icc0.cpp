#include <algorithm>
#include <cmath>
#include <string>

#include "krylov_gap/kernels.hpp"
#include "krylov_gap/precond.hpp"

namespace krylov_gap {
namespace {

constexpr double kZeroPivotReplacement = 1e-8;

}  // namespace

IccFactor icc0_factor(const CsrMatrix& a) {
    if (!a.square()) throw ConfigError("icc0_factor: matrix must be square");
    if (!has_symmetric_pattern(a)) throw ConfigError("icc0_factor: sparsity pattern is not symmetric");
    const index_t n = a.n_rows();

    // Pattern of lower(A), diagonal last in each row.
    std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    std::vector<index_t> cols;
    std::vector<double> vals;
    cols.reserve(static_cast<std::size_t>(a.nnz() / 2 + n));
    vals.reserve(cols.capacity());
    std::vector<index_t> diag_pos(static_cast<std::size_t>(n), -1);

    IccFactor f;
    f.diag_shift_applied.assign(static_cast<std::size_t>(n), false);

    for (index_t i = 0; i < n; ++i) {
        const auto acols = a.row_cols(i);
        const auto avals = a.row_values(i);
        const index_t row_begin = static_cast<index_t>(cols.size());
        bool has_diag = false;
        for (std::size_t q = 0; q < acols.size(); ++q) {
            const index_t j = acols[q];
            if (j > i) break;
            if (j == i) {
                has_diag = true;
                double d = avals[q];
                for (index_t p = row_begin; p < static_cast<index_t>(cols.size()); ++p) {
                    const double lik = vals[p];
                    d = d - lik * lik;
                }
                if (!(d > 0.0)) {
                    f.diag_shift_applied[static_cast<std::size_t>(i)] = true;
                    ++f.shifted_pivots;
                    d = (d == 0.0 || std::isnan(d)) ? kZeroPivotReplacement : std::abs(d);
                }
                diag_pos[static_cast<std::size_t>(i)] = static_cast<index_t>(cols.size());
                cols.push_back(i);
                vals.push_back(std::sqrt(d));
                break;
            }
            // s = a_ij - sum_{k<j} L_ik L_jk over the common pattern, k ascending.
            double s = avals[q];
            index_t pi = row_begin;
            const index_t pi_end = static_cast<index_t>(cols.size());
            index_t pj = offsets[j];
            const index_t pj_end = diag_pos[static_cast<std::size_t>(j)];
            while (pi < pi_end && pj < pj_end) {
                if (cols[pi] == cols[pj]) {
                    s = s - vals[pi] * vals[pj];
                    ++pi;
                    ++pj;
                } else if (cols[pi] < cols[pj]) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            cols.push_back(j);
            vals.push_back(s / vals[diag_pos[static_cast<std::size_t>(j)]]);
        }
        if (!has_diag) {
            throw ConfigError("icc0_factor: structurally missing diagonal in row " + std::to_string(i));
        }
        offsets[i + 1] = static_cast<index_t>(cols.size());
    }
    f.lower = CsrMatrix(n, n, std::move(offsets), std::move(cols), std::move(vals));
    f.upper = f.lower.transpose();
    return f;
}

IccFactor icc_factor_from_lower(CsrMatrix lower) {
    if (!lower.square()) throw ConfigError("icc_factor_from_lower: matrix must be square");
    for (index_t i = 0; i < lower.n_rows(); ++i) {
        const auto c = lower.row_cols(i);
        if (c.empty() || c.back() != i || !(lower.row_values(i).back() > 0.0)) {
            throw ConfigError("icc_factor_from_lower: row " + std::to_string(i) +
                              " needs a positive diagonal as its last entry");
        }
    }
    IccFactor f;
    f.diag_shift_applied.assign(static_cast<std::size_t>(lower.n_rows()), false);
    f.upper = lower.transpose();
    f.lower = std::move(lower);
    return f;
}

index_t Preconditioner::size() const {
    if (const auto* id = std::get_if<IdentityPreconditioner>(&impl_)) return id->n;
    return std::get<IccFactor>(impl_).lower.n_rows();
}

index_t Preconditioner::mu_tilde() const {
    if (is_identity()) return 1;
    return 2 * max_row_nnz(std::get<IccFactor>(impl_).lower) - 1;
}

void Preconditioner::apply(std::span<const double> in, std::span<double> out) const {
    require_same_size(static_cast<std::size_t>(size()), in.size(), "apply_preconditioner");
    require_same_size(in.size(), out.size(), "apply_preconditioner");
    if (is_identity()) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const IccFactor& f = std::get<IccFactor>(impl_);
    const index_t n = f.lower.n_rows();
    const auto& lo = f.lower.row_offsets();
    const auto& lc = f.lower.col_indices();
    const auto& lv = f.lower.values();
    // Forward: L y = in; the diagonal is the last entry of each row.
    for (index_t i = 0; i < n; ++i) {
        double s = in[i];
        const index_t diag = lo[i + 1] - 1;
        for (index_t k = lo[i]; k < diag; ++k) s = s - lv[k] * out[lc[k]];
        out[i] = s / lv[diag];
    }
    // Backward: L^T z = y; the diagonal is the first entry of each row of L^T.
    const auto& uo = f.upper.row_offsets();
    const auto& uc = f.upper.col_indices();
    const auto& uv = f.upper.values();
    for (index_t i = n - 1; i >= 0; --i) {
        const index_t diag = uo[i];
        double s = out[i];
        for (index_t k = diag + 1; k < uo[i + 1]; ++k) s = s - uv[k] * out[uc[k]];
        out[i] = s / uv[diag];
    }
}

Vector apply_preconditioner(const Preconditioner& m, std::span<const double> v) {
    Vector out(v.size());
    m.apply(v, out);
    return out;
}

NormEstimate estimate_preconditioner_norm(const Preconditioner& m, double tol, index_t max_iters) {
    Vector v = power_iteration_seed(m.size());
    Vector mv(v.size());
    Vector mmv(v.size());
    NormEstimate est;
    double lambda_prev = 0.0;
    for (index_t it = 1; it <= max_iters; ++it) {
        m.apply(v, mv);
        const double lambda = kernels::dot(mv, mv);
        est.value = std::sqrt(lambda);
        est.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_prev) < tol * lambda) {
            est.converged = true;
            break;
        }
        lambda_prev = lambda;
        // M is symmetric, so M^{-T} = M^{-1}.
        m.apply(mv, mmv);
        const double nrm = norm2(mmv);
        if (nrm == 0.0) {
            est.converged = true;
            break;
        }
        kernels::scale(1.0 / nrm, mmv, v);
    }
    return est;
}

}  // namespace krylov_gap
