#pragma once

#include <span>

#include "krylov_gap/csr.hpp"
#include "krylov_gap/precond.hpp"
#include "krylov_gap/solver_types.hpp"

namespace krylov_gap {

// All solvers share the same contract:
//  - every vector operation is a sequential binary64 loop (see kernels.hpp);
//  - the shadow residual is r_0;
//  - the stopping test is ||r_i|| <= tol ||b|| on the recursive residual, or on
//    b - A x_i with StoppingNorm::true_residual;
//  - history rows hold index 0 (initial state) to iterations;
//  - instrumentation work (gaps, norms for the bounds) never feeds back into
//    the iteration and is excluded from SolveResult::ops.

/// Preconditioned BiCGStab: 2 spmv and 2 preconditioner applications per iteration.
SolveResult bicgstab_classic(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                             std::span<const double> x0, const SolveOptions& opts,
                             const IterationHook& hook = {});

/// Preconditioned pipelined BiCGStab. Residual replacement is evaluated after
/// the w_{i+1} update, before the second group of dot products.
SolveResult bicgstab_pipelined(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                               std::span<const double> x0, const SolveOptions& opts,
                               const ReplacementPolicy& rr = {}, const IterationHook& hook = {});

/// Preconditioned CG.
SolveResult cg_classic(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                       std::span<const double> x0, const SolveOptions& opts,
                       const IterationHook& hook = {});

/// Preconditioned pipelined CG (Ghysels and Vanroose): 1 spmv and 1
/// preconditioner application per iteration. Replacement is evaluated after
/// the x, r, u, w updates.
SolveResult cg_pipelined(const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                         std::span<const double> x0, const SolveOptions& opts,
                         const ReplacementPolicy& rr = {}, const IterationHook& hook = {});

/// Dispatch on the solver kind; the policy is ignored by the classic solvers.
SolveResult solve(SolverKind kind, const CsrMatrix& a, const Preconditioner& m,
                  std::span<const double> b, std::span<const double> x0, const SolveOptions& opts,
                  const ReplacementPolicy& rr = {}, const IterationHook& hook = {});

}  // namespace krylov_gap
