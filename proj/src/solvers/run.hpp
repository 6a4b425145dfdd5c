#pragma once

// Bookkeeping shared by the solver loops: records, stopping, stagnation,
// breakdown and the running gap bound.

#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "krylov_gap/csr.hpp"
#include "krylov_gap/kernels.hpp"
#include "krylov_gap/precond.hpp"
#include "krylov_gap/solver_types.hpp"
#include "krylov_gap/stability.hpp"

namespace krylov_gap::detail {

class Run {
public:
    Run(const char* who, const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
        std::span<const double> x0, const SolveOptions& opts, const IterationHook& hook)
        : a_(a), m_(m), b_(b), opts_(opts), hook_(hook) {
        opts.validate();
        if (!a.square()) throw DimensionError(std::string(who) + ": matrix must be square");
        const auto n = static_cast<std::size_t>(a.n_rows());
        require_same_size(n, b.size(), who);
        require_same_size(n, x0.size(), who);
        require_same_size(n, static_cast<std::size_t>(m.size()), who);
        result.b_norm = norm2(b);
        if (opts.track_bounds) {
            c_ = opts.bound_constants ? *opts.bound_constants : make_bound_constants(a, m);
            result.bound_constants = c_;
        }
    }

    bool tracking() const { return opts_.track_bounds; }
    const BoundConstants& constants() const { return c_; }

    void spmv(std::span<const double> in, std::span<double> out) {
        spmv_into(a_, in, out);
        ++result.ops.spmv;
    }
    void precond(std::span<const double> in, std::span<double> out) {
        m_.apply(in, out);
        ++result.ops.precond;
    }

    /// Records the state under st.iteration. Returns true when the stopping test holds.
    bool record(const SolverState& st, double r_norm, bool replaced) {
        GapRecord rec;
        if (opts_.record_gaps) {
            rec = measure_gaps(st, a_, m_, b_);
        } else {
            rec.i = st.iteration;
            Vector res(st.x.size());
            spmv_into(a_, st.x, res);
            kernels::sub(b_, res, res);
            rec.true_residual_norm = norm2(res);
        }
        rec.recursive_residual_norm = r_norm;
        rec.replaced = replaced;
        if (bounds) {
            rec.bound_f_r = bounds->dr;
            rec.bound_f_k = preconditioned_gap_bound(*bounds);
        }
        result.history.push_back(rec);
        if (hook_) hook_(st, rec);
        const double measure =
            opts_.stopping_norm == StoppingNorm::recursive ? r_norm : rec.true_residual_norm;
        return measure <= opts_.tol * result.b_norm;
    }

    /// Stagnation test on the recursive residual norm after record i.
    bool stagnated(index_t i, double r_norm) {
        if (i == 0 || r_norm < best_norm_ * (1.0 - opts_.stagnation_drop)) {
            best_norm_ = r_norm;
            best_iter_ = i;
            return false;
        }
        return i - best_iter_ >= opts_.stagnation_window;
    }

    void breakdown(const std::string& why) {
        result.status = SolveStatus::breakdown;
        result.breakdown_reason = why;
    }

    /// True when |num| is negligible against scale or the value is not finite.
    bool negligible(double value, double scale) const {
        return !std::isfinite(value) || value == 0.0 || std::abs(value) < opts_.breakdown_eps * scale;
    }

    SolveResult finish(const SolverState& st, index_t iterations) {
        result.x_final = st.x;
        result.iterations = iterations;
        return std::move(result);
    }

    SolveResult result;
    std::optional<LocalBoundState> bounds;

private:
    const CsrMatrix& a_;
    const Preconditioner& m_;
    std::span<const double> b_;
    const SolveOptions& opts_;
    const IterationHook& hook_;
    BoundConstants c_;
    double best_norm_ = 0.0;
    index_t best_iter_ = 0;
};

inline double nrm(const Vector& v) { return norm2(v); }

}  // namespace krylov_gap::detail
