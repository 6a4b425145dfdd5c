#include <cmath>

#include "krylov_gap/solvers.hpp"
#include "run.hpp"

namespace krylov_gap {

using detail::nrm;
using detail::Run;
namespace k = kernels;

SolveResult cg_classic(const CsrMatrix& a, const Preconditioner& mp, std::span<const double> b,
                       std::span<const double> x0, const SolveOptions& opts, const IterationHook& hook) {
    Run run("cg_classic", a, mp, b, x0, opts, hook);
    const std::size_t n = b.size();
    SolverState st;  // p lives in g, A p in s, M^{-1} r in k
    st.x.assign(x0.begin(), x0.end());
    st.r.resize(n);
    st.k.resize(n);
    st.s.assign(n, 0.0);
    run.spmv(st.x, st.r);
    k::sub(b, st.r, st.r);
    run.precond(st.r, st.k);
    st.g = st.k;
    st.r0_shadow = st.r;

    const double r0_norm = nrm(st.r);
    run.result.r0_norm = r0_norm;
    if (run.tracking()) {
        run.bounds = initial_gap_bounds(run.constants(), nrm(st.x), run.result.b_norm, 0, 0, 0, 0, 0);
    }
    double r_norm = r0_norm;
    if (run.record(st, r_norm, false)) {
        run.result.status = SolveStatus::converged;
        return run.finish(st, 0);
    }
    run.stagnated(0, r_norm);

    double gamma = k::dot(st.r, st.k);
    double beta_used = 0.0;
    index_t i = 0;
    for (; i < opts.max_iters; ++i) {
        run.spmv(st.g, st.s);
        const double delta = k::dot(st.g, st.s);
        if (!(delta > 0.0) || !std::isfinite(delta)) {
            run.breakdown("p^T A p is not positive");
            break;
        }
        const double alpha = gamma / delta;
        if (!std::isfinite(alpha)) {
            run.breakdown("alpha is not finite");
            break;
        }
        st.alpha = alpha;
        CgLocalNorms ln;
        if (run.tracking()) {
            const double aa = std::abs(alpha);
            ln.x = nrm(st.x);
            ln.alpha_p = aa * nrm(st.g);
            ln.r = r_norm;
            ln.alpha_s = aa * nrm(st.s);
        }
        k::add_scaled(st.x, alpha, st.g, st.x);
        k::sub_scaled(st.r, alpha, st.s, st.r);
        if (run.tracking()) update_gap_bound(*run.bounds, local_error_bounds(ln, run.constants()));
        run.precond(st.r, st.k);
        const double gamma_new = k::dot(st.r, st.k);
        r_norm = nrm(st.r);

        run.result.trace.push(alpha, beta_used, 0.0);
        st.iteration = i + 1;
        if (run.record(st, r_norm, false)) {
            run.result.status = SolveStatus::converged;
            ++i;
            break;
        }
        if (run.stagnated(i + 1, r_norm)) {
            run.result.status = SolveStatus::stagnation;
            ++i;
            break;
        }
        const double beta = gamma_new / gamma;
        if (!std::isfinite(beta)) {
            ++i;
            run.breakdown("beta is not finite");
            break;
        }
        st.beta = beta;
        k::add_scaled(st.k, beta, st.g, st.g);
        gamma = gamma_new;
        beta_used = beta;
    }
    return run.finish(st, i);
}

SolveResult cg_pipelined(const CsrMatrix& a, const Preconditioner& mp, std::span<const double> b,
                         std::span<const double> x0, const SolveOptions& opts,
                         const ReplacementPolicy& rr, const IterationHook& hook) {
    rr.validate();
    Run run("cg_pipelined", a, mp, b, x0, opts, hook);
    const std::size_t n = b.size();
    SolverState st;  // u lives in k, p in g, q in l
    st.x.assign(x0.begin(), x0.end());
    st.r.resize(n);
    st.k.resize(n);
    st.w.resize(n);
    run.spmv(st.x, st.r);
    k::sub(b, st.r, st.r);
    run.precond(st.r, st.k);
    run.spmv(st.k, st.w);
    st.r0_shadow = st.r;
    for (Vector* v : {&st.g, &st.s, &st.l, &st.z, &st.m, &st.n}) v->assign(n, 0.0);

    const double r0_norm = nrm(st.r);
    run.result.r0_norm = r0_norm;
    if (rr.kind == ReplacementPolicy::Kind::automated && !run.tracking()) {
        throw ConfigError("automated replacement needs track_bounds");
    }
    if (run.tracking()) {
        run.bounds = initial_gap_bounds(run.constants(), nrm(st.x), run.result.b_norm, r0_norm,
                                        nrm(st.k), 0, 0, 0);
    }
    double r_norm = r0_norm;
    if (run.record(st, r_norm, false)) {
        run.result.status = SolveStatus::converged;
        return run.finish(st, 0);
    }
    run.stagnated(0, r_norm);

    ReplacementWindow window;
    window.r0_norm = r0_norm;
    window.f_prev = run.bounds ? run.bounds->dr : 0.0;
    window.r_prev = r0_norm;

    double gamma_prev = 0.0;
    double alpha_prev = 0.0;
    index_t i = 0;
    for (; i < opts.max_iters; ++i) {
        const double gamma = k::dot(st.r, st.k);
        const double delta = k::dot(st.w, st.k);
        run.precond(st.w, st.m);
        run.spmv(st.m, st.n);
        double beta = 0.0;
        double denom = delta;
        if (i > 0) {
            beta = gamma / gamma_prev;
            denom = delta - beta * gamma / alpha_prev;
        }
        if (!(denom > 0.0) || !std::isfinite(denom) || !std::isfinite(beta)) {
            run.breakdown("p^T A p is not positive");
            break;
        }
        const double alpha = gamma / denom;
        if (!std::isfinite(alpha)) {
            run.breakdown("alpha is not finite");
            break;
        }
        st.alpha = alpha;
        st.beta = beta;

        PipeCgLocalNorms ln;
        if (run.tracking()) {
            const double ab = std::abs(beta);
            ln.beta_p = ab * nrm(st.g);
            ln.beta_s = ab * nrm(st.s);
            ln.beta_q = ab * nrm(st.l);
            ln.beta_z = ab * nrm(st.z);
            ln.u = nrm(st.k);
            ln.w = nrm(st.w);
            ln.m = nrm(st.m);
            ln.n = nrm(st.n);
        }
        k::add_scaled(st.n, beta, st.z, st.z);
        k::add_scaled(st.m, beta, st.l, st.l);
        k::add_scaled(st.w, beta, st.s, st.s);
        k::add_scaled(st.k, beta, st.g, st.g);
        if (run.tracking()) {
            const double aa = std::abs(alpha);
            ln.x = nrm(st.x);
            ln.alpha_p = aa * nrm(st.g);
            ln.r = r_norm;
            ln.alpha_s = aa * nrm(st.s);
            ln.alpha_q = aa * nrm(st.l);
            ln.alpha_z = aa * nrm(st.z);
        }
        k::add_scaled(st.x, alpha, st.g, st.x);
        k::sub_scaled(st.r, alpha, st.s, st.r);
        k::sub_scaled(st.k, alpha, st.l, st.k);
        k::sub_scaled(st.w, alpha, st.z, st.w);
        if (run.tracking()) update_gap_bound(*run.bounds, alpha, beta, local_error_bounds(ln, run.constants()));
        r_norm = nrm(st.r);

        window.f_curr = run.bounds ? run.bounds->dr : 0.0;
        window.r_curr = r_norm;
        bool replaced = false;
        if (should_replace(rr, window, i + 1)) {
            const OpCounts extra = perform_replacement_pcg(st, a, mp, b);
            run.result.ops.spmv += extra.spmv;
            run.result.ops.precond += extra.precond;
            r_norm = nrm(st.r);
            if (run.tracking()) {
                run.bounds = initial_gap_bounds(run.constants(), nrm(st.x), run.result.b_norm, r_norm,
                                                nrm(st.k), nrm(st.g), nrm(st.s), nrm(st.l));
            }
            replaced = true;
            run.result.replacements.push_back(i + 1);
        }
        if (r_norm < rr.stop_fraction * r0_norm) window.stop_reached = true;
        window.f_prev = run.bounds ? run.bounds->dr : 0.0;
        window.r_prev = r_norm;

        run.result.trace.push(alpha, beta, 0.0);
        st.iteration = i + 1;
        if (run.record(st, r_norm, replaced)) {
            run.result.status = SolveStatus::converged;
            ++i;
            break;
        }
        if (run.stagnated(i + 1, r_norm)) {
            run.result.status = SolveStatus::stagnation;
            ++i;
            break;
        }
        gamma_prev = gamma;
        alpha_prev = alpha;
    }
    return run.finish(st, i);
}

SolveResult solve(SolverKind kind, const CsrMatrix& a, const Preconditioner& m, std::span<const double> b,
                  std::span<const double> x0, const SolveOptions& opts, const ReplacementPolicy& rr,
                  const IterationHook& hook) {
    switch (kind) {
        case SolverKind::cg: return cg_classic(a, m, b, x0, opts, hook);
        case SolverKind::pcg_pipelined: return cg_pipelined(a, m, b, x0, opts, rr, hook);
        case SolverKind::bicgstab: return bicgstab_classic(a, m, b, x0, opts, hook);
        case SolverKind::bicgstab_pipelined: return bicgstab_pipelined(a, m, b, x0, opts, rr, hook);
    }
    throw ConfigError("unknown solver kind");
}

}  // namespace krylov_gap
