#pragma once

#include <span>
#include <variant>
#include <vector>

#include "krylov_gap/csr.hpp"

namespace krylov_gap {

/// Zero fill-in incomplete Cholesky factor, M = L L^T.
struct IccFactor {
    CsrMatrix lower;        // L, same pattern as lower(A) with the diagonal
    CsrMatrix upper;        // L^T, kept for the backward solve
    std::vector<bool> diag_shift_applied;  // per row: pivot was <= 0 and got replaced
    index_t shifted_pivots = 0;
};

/// IC(0), row by row (ikj). Updates are restricted to positions of lower(A).
/// A pivot <= 0 is replaced by its absolute value (1e-8 when zero) and flagged.
/// Throws ConfigError for a missing diagonal entry or an unsymmetric pattern.
IccFactor icc0_factor(const CsrMatrix& a);

/// Builds a factor from an explicit lower-triangular L (diagonal must be > 0).
IccFactor icc_factor_from_lower(CsrMatrix lower);

struct IdentityPreconditioner {
    index_t n = 0;
};

/// M^{-1} application: identity or (L L^T)^{-1}.
class Preconditioner {
public:
    Preconditioner() = default;
    static Preconditioner identity(index_t n) { return Preconditioner(IdentityPreconditioner{n}); }
    static Preconditioner icc0(const CsrMatrix& a) { return Preconditioner(icc0_factor(a)); }
    explicit Preconditioner(IdentityPreconditioner id) : impl_(id) {}
    explicit Preconditioner(IccFactor f) : impl_(std::move(f)) {}

    index_t size() const;
    bool is_identity() const { return std::holds_alternative<IdentityPreconditioner>(impl_); }
    const IccFactor* factor() const { return std::get_if<IccFactor>(&impl_); }

    /// out = M^{-1} in. Forward solve with L then backward solve with L^T,
    /// each sequential. The identity copies bitwise. out must not alias in.
    void apply(std::span<const double> in, std::span<double> out) const;

    /// Proxy for the maximum row count of M^{-1}: 1 for the identity,
    /// 2*max_row_nnz(L)-1 for a factor.
    index_t mu_tilde() const;

private:
    std::variant<IdentityPreconditioner, IccFactor> impl_{IdentityPreconditioner{}};
};

Vector apply_preconditioner(const Preconditioner& m, std::span<const double> v);

/// Power iteration on v -> M^{-T}(M^{-1} v); estimates ||M^{-1}||_2.
NormEstimate estimate_preconditioner_norm(const Preconditioner& m, double tol = kPowerTol,
                                          index_t max_iters = kPowerMaxIters);

}  // namespace krylov_gap
