#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krylov_gap/common.hpp"

namespace krylov_gap {

enum class SolverKind { cg, pcg_pipelined, bicgstab, bicgstab_pipelined };

std::string_view solver_name(SolverKind k);

/// Accepts the canonical names plus the CLI aliases pcg, pipecg, pbicgstab.
SolverKind parse_solver_kind(std::string_view s);

enum class StoppingNorm { recursive, true_residual };

enum class SolveStatus { converged, max_iters, breakdown, stagnation };

std::string_view status_name(SolveStatus s);
SolveStatus parse_status(std::string_view s);

/// Constants entering the local rounding error bounds. norm_a and norm_minv are
/// already inflated by the safety factor.
struct BoundConstants {
    double norm_a = 1.0;
    double norm_minv = 1.0;
    double mu = 1.0;        // max nonzeros per row of A
    double mu_tilde = 1.0;  // proxy for max nonzeros per row of M^{-1}
    double sqrt_n = 1.0;
    double eps = kUnitRoundoff;
};

inline constexpr double kNormSafetyFactor = 1.01;

struct SolveOptions {
    double tol = 1e-8;  // relative to ||b||
    index_t max_iters = 1000;
    double breakdown_eps = 1e-30;
    StoppingNorm stopping_norm = StoppingNorm::recursive;
    /// Measure all gaps with explicit kernels at every recorded iteration.
    bool record_gaps = true;
    /// Maintain the running gap bounds (needed by the automated replacement policy).
    bool track_bounds = true;
    /// Reused across solves when set; otherwise estimated per solve.
    std::optional<BoundConstants> bound_constants;
    index_t stagnation_window = 5000;
    double stagnation_drop = 1e-3;

    /// Throws ConfigError.
    void validate() const;
};

/// All recurrence variables of the four solvers. Classic BiCGStab uses
/// x, r, p, q, g, s, u, y; pipelined BiCGStab additionally k, w, l, z, m, t, n, v.
/// The CG variants reuse slots: classic CG keeps p in g, A p in s and M^{-1} r
/// in k; pipelined CG keeps u in k, p in g, q in l and uses s, w, z, m, n as named.
/// Slots a solver does not use stay empty.
struct SolverState {
    index_t iteration = 0;
    Vector x, r, p, q, g, s, u, y;
    Vector k, w, l, z, m, t, n, v;
    Vector r0_shadow;
    double alpha = 0.0;
    double beta = 0.0;
    double omega = 0.0;
    struct DotCache {
        double r0_r = 0.0;
        double r0_w = 0.0;
        double r0_s = 0.0;
        double r0_z = 0.0;
    } dot_cache;
};

/// alphas[i], betas[i], omegas[i] are the coefficients used in iteration i
/// (betas[0] = 0). Classic BiCGStab's beta computed at the end of iteration i
/// is stored at betas[i+1]; the CG variants store omega = 0.
struct CoefficientTrace {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> omegas;

    index_t size() const { return static_cast<index_t>(alphas.size()); }
    void push(double alpha, double beta, double omega) {
        alphas.push_back(alpha);
        betas.push_back(beta);
        omegas.push_back(omega);
    }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Measured quantities after iteration i-1, i.e. for x_i and r_i. Auxiliary
/// gaps pair up as in the coupled gap system: gap_w and gap_k belong to
/// w_i, k_i while gap_s, gap_z and gap_l belong to s_{i-1}, z_{i-1}, l_{i-1}.
/// Gaps a solver has no variable for are NaN.
struct GapRecord {
    index_t i = 0;
    double recursive_residual_norm = kNaN;
    double true_residual_norm = kNaN;
    double gap_r = kNaN;
    double gap_s = kNaN;
    double gap_w = kNaN;
    double gap_z = kNaN;
    double gap_k = kNaN;
    double gap_l = kNaN;
    double bound_f_r = kNaN;
    double bound_f_k = kNaN;  // preconditioned gap bound, diagnostic only
    bool replaced = false;
};

struct ReplacementPolicy {
    enum class Kind { none, periodic, automated };
    Kind kind = Kind::none;
    index_t period = 100;
    double tau = kSqrtUnitRoundoff;
    /// Periodic replacement stops for good once ||r_i|| < stop_fraction*||r_0||.
    double stop_fraction = kSqrtUnitRoundoff;

    static ReplacementPolicy none() { return {}; }
    static ReplacementPolicy periodic(index_t p) {
        ReplacementPolicy r;
        r.kind = Kind::periodic;
        r.period = p;
        return r;
    }
    static ReplacementPolicy automated(double tau = kSqrtUnitRoundoff) {
        ReplacementPolicy r;
        r.kind = Kind::automated;
        r.tau = tau;
        return r;
    }

    void validate() const;
};

/// "none", "auto", "automated", "periodic:<P>".
ReplacementPolicy parse_replacement_policy(std::string_view s);
std::string format_replacement_policy(const ReplacementPolicy& p);

struct OpCounts {
    index_t spmv = 0;
    index_t precond = 0;
};

struct SolveResult {
    Vector x_final;
    SolveStatus status = SolveStatus::max_iters;
    index_t iterations = 0;
    std::vector<GapRecord> history;  // iterations + 1 rows
    CoefficientTrace trace;
    std::vector<index_t> replacements;  // record indices i whose x_i, r_i were replaced
    OpCounts ops;                       // solver work only, instrumentation excluded
    std::string breakdown_reason;
    double b_norm = 0.0;
    double r0_norm = 0.0;
    std::optional<BoundConstants> bound_constants;
};

/// Called once per recorded iteration with the state after any replacement.
using IterationHook = std::function<void(const SolverState&, const GapRecord&)>;

}  // namespace krylov_gap
