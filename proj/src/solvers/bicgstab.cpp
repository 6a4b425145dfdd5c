#include <cmath>

#include "krylov_gap/solvers.hpp"
#include "run.hpp"

namespace krylov_gap {

using detail::nrm;
using detail::Run;
namespace k = kernels;

SolveResult bicgstab_classic(const CsrMatrix& a, const Preconditioner& mp, std::span<const double> b,
                             std::span<const double> x0, const SolveOptions& opts,
                             const IterationHook& hook) {
    Run run("bicgstab_classic", a, mp, b, x0, opts, hook);
    const std::size_t n = b.size();
    SolverState st;
    st.x.assign(x0.begin(), x0.end());
    st.r.resize(n);
    run.spmv(st.x, st.r);
    k::sub(b, st.r, st.r);
    st.r0_shadow = st.r;
    st.p = st.r;
    st.g.assign(n, 0.0);
    st.s.assign(n, 0.0);
    st.q.assign(n, 0.0);
    st.u.assign(n, 0.0);
    st.y.assign(n, 0.0);

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

    double rho = k::dot(st.r0_shadow, st.r);
    double beta_used = 0.0;  // beta that formed the current p
    index_t i = 0;
    for (; i < opts.max_iters; ++i) {
        run.precond(st.p, st.g);
        run.spmv(st.g, st.s);
        const double r0s = k::dot(st.r0_shadow, st.s);
        if (run.negligible(r0s, r0_norm * nrm(st.s))) {
            run.breakdown("(r0, s) vanished");
            break;
        }
        const double alpha = rho / r0s;
        if (!std::isfinite(alpha)) {
            run.breakdown("alpha is not finite");
            break;
        }
        st.alpha = alpha;
        k::sub_scaled(st.r, alpha, st.s, st.q);

        ClassicLocalNorms ln;
        if (run.tracking()) {
            const double aa = std::abs(alpha);
            ln.r = r_norm;
            ln.alpha_s = aa * nrm(st.s);
            ln.alpha_g = aa * nrm(st.g);
            ln.alpha_p = aa * nrm(st.p);
            ln.x = nrm(st.x);
        }

        run.precond(st.q, st.u);
        run.spmv(st.u, st.y);
        const double qy = k::dot(st.q, st.y);
        const double yy = k::dot(st.y, st.y);
        if (run.negligible(yy, k::dot(st.q, st.q))) {
            // q is (numerically) A-orthogonal to every correction: take the half step.
            const double q_norm = nrm(st.q);
            if (q_norm <= opts.tol * run.result.b_norm) {
                k::add_scaled(st.x, alpha, st.g, st.x);
                st.r = st.q;
                run.result.trace.push(alpha, beta_used, 0.0);
                st.iteration = i + 1;
                run.record(st, q_norm, false);
                run.result.status = SolveStatus::converged;
                return run.finish(st, i + 1);
            }
            run.breakdown("(y, y) vanished");
            break;
        }
        const double omega = qy / yy;
        if (!std::isfinite(omega) || omega == 0.0) {
            run.breakdown("omega is zero or not finite");
            break;
        }
        st.omega = omega;
        k::add_two_scaled(st.x, alpha, st.g, omega, st.u, st.x);
        k::sub_scaled(st.q, omega, st.y, st.r);

        if (run.tracking()) {
            const double ao = std::abs(omega);
            ln.omega_u = ao * nrm(st.u);
            ln.omega_q = ao * nrm(st.q);
            ln.q = nrm(st.q);
            ln.omega_y = ao * nrm(st.y);
            update_gap_bound(*run.bounds, local_error_bounds(ln, run.constants()));
        }

        const double rho_new = k::dot(st.r0_shadow, st.r);
        r_norm = nrm(st.r);
        run.result.trace.push(alpha, beta_used, omega);
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
        const double beta = (alpha / omega) * rho_new / rho;
        if (!std::isfinite(beta)) {
            ++i;
            run.breakdown("beta is not finite");
            break;
        }
        st.beta = beta;
        k::add_scaled_diff(st.r, beta, st.p, omega, st.s, st.p);
        rho = rho_new;
        beta_used = beta;
    }
    return run.finish(st, i);
}

SolveResult bicgstab_pipelined(const CsrMatrix& a, const Preconditioner& mp, std::span<const double> b,
                               std::span<const double> x0, const SolveOptions& opts,
                               const ReplacementPolicy& rr, const IterationHook& hook) {
    rr.validate();
    Run run("bicgstab_pipelined", a, mp, b, x0, opts, hook);
    const std::size_t n = b.size();
    SolverState st;
    st.x.assign(x0.begin(), x0.end());
    st.r.resize(n);
    st.k.resize(n);
    st.w.resize(n);
    st.m.resize(n);
    st.t.resize(n);
    run.spmv(st.x, st.r);
    k::sub(b, st.r, st.r);
    run.precond(st.r, st.k);
    run.spmv(st.k, st.w);
    run.precond(st.w, st.m);
    run.spmv(st.m, st.t);
    st.r0_shadow = st.r;
    for (Vector* v : {&st.g, &st.s, &st.l, &st.z, &st.n, &st.v, &st.q, &st.u, &st.y}) v->assign(n, 0.0);

    const double r0_norm = nrm(st.r);
    run.result.r0_norm = r0_norm;
    const bool need_bounds = run.tracking() || rr.kind == ReplacementPolicy::Kind::automated;
    if (rr.kind == ReplacementPolicy::Kind::automated && !run.tracking()) {
        throw ConfigError("automated replacement needs track_bounds");
    }
    if (need_bounds) {
        run.bounds = initial_gap_bounds(run.constants(), nrm(st.x), run.result.b_norm, r0_norm,
                                        nrm(st.k), 0, 0, 0);
    }
    double r_norm = r0_norm;
    if (run.record(st, r_norm, false)) {
        run.result.status = SolveStatus::converged;
        return run.finish(st, 0);
    }
    run.stagnated(0, r_norm);

    double rho = k::dot(st.r0_shadow, st.r);
    st.dot_cache.r0_r = rho;
    st.dot_cache.r0_w = k::dot(st.r0_shadow, st.w);
    const double r0_sq = r0_norm * r0_norm;
    if (run.negligible(st.dot_cache.r0_w, r0_sq)) {
        run.breakdown("(r0, w0) vanished");
        return run.finish(st, 0);
    }
    double alpha = rho / st.dot_cache.r0_w;
    double beta = 0.0;
    double omega_prev = 0.0;
    st.alpha = alpha;
    st.beta = beta;

    ReplacementWindow window;
    window.r0_norm = r0_norm;
    window.f_prev = run.bounds ? run.bounds->dr : 0.0;
    window.r_prev = r0_norm;
    double pending_z_jump = 0.0;  // ||z_new - z_old|| of the last replacement; n is stale by this much

    index_t i = 0;
    for (; i < opts.max_iters; ++i) {
        PipelinedLocalNorms ln;
        if (need_bounds) {
            const double ab = std::abs(beta);
            const double abo = std::abs(beta * omega_prev);
            const double ng = nrm(st.g), nl = nrm(st.l), nn = nrm(st.n);
            const double ns = nrm(st.s), nz = nrm(st.z), nv = nrm(st.v);
            ln.beta_g = ab * ng;
            ln.beta_omega_l = abo * nl;
            ln.beta_s = ab * ns;
            ln.beta_omega_z = abo * nz;
            ln.beta_l = ab * nl;
            ln.beta_omega_n = abo * nn;
            ln.beta_z = ab * nz;
            ln.beta_omega_v = abo * nv;
            ln.k = nrm(st.k);
            ln.w = nrm(st.w);
            ln.m = nrm(st.m);
            ln.t = nrm(st.t);
        }
        k::add_scaled_diff(st.k, beta, st.g, omega_prev, st.l, st.g);
        k::add_scaled_diff(st.w, beta, st.s, omega_prev, st.z, st.s);
        k::add_scaled_diff(st.m, beta, st.l, omega_prev, st.n, st.l);
        k::add_scaled_diff(st.t, beta, st.z, omega_prev, st.v, st.z);
        k::sub_scaled(st.r, alpha, st.s, st.q);
        k::sub_scaled(st.k, alpha, st.l, st.u);
        k::sub_scaled(st.w, alpha, st.z, st.y);
        const double qy = k::dot(st.q, st.y);
        const double yy = k::dot(st.y, st.y);
        run.precond(st.z, st.n);
        run.spmv(st.n, st.v);

        if (run.negligible(yy, k::dot(st.q, st.q))) {
            const double q_norm = nrm(st.q);
            if (q_norm <= opts.tol * run.result.b_norm) {
                k::add_scaled(st.x, alpha, st.g, st.x);
                st.r = st.q;
                st.k = st.u;
                st.w = st.y;
                run.result.trace.push(alpha, beta, 0.0);
                st.iteration = i + 1;
                run.record(st, q_norm, false);
                run.result.status = SolveStatus::converged;
                return run.finish(st, i + 1);
            }
            run.breakdown("(y, y) vanished");
            break;
        }
        const double omega = qy / yy;
        if (!std::isfinite(omega) || omega == 0.0) {
            run.breakdown("omega is zero or not finite");
            break;
        }
        st.omega = omega;

        if (need_bounds) {
            const double aa = std::abs(alpha), ao = std::abs(omega), aoa = std::abs(omega * alpha);
            ln.r = r_norm;
            ln.alpha_s = aa * nrm(st.s);
            ln.alpha_l = aa * nrm(st.l);
            ln.alpha_z = aa * nrm(st.z);
            ln.x = nrm(st.x);
            ln.alpha_g = aa * nrm(st.g);
            ln.omega_u = ao * nrm(st.u);
            ln.q = nrm(st.q);
            ln.omega_y = ao * nrm(st.y);
            ln.u = nrm(st.u);
            ln.omega_m = ao * ln.m;
            ln.omega_w = ao * ln.w;
            ln.omega_alpha_n = aoa * nrm(st.n);
            ln.omega_alpha_z = aoa * nrm(st.z);
            ln.y = nrm(st.y);
            ln.omega_t = ao * ln.t;
            ln.omega_alpha_v = aoa * nrm(st.v);
        }

        k::add_two_scaled(st.x, alpha, st.g, omega, st.u, st.x);
        k::sub_scaled(st.q, omega, st.y, st.r);
        k::sub_scaled_diff(st.u, omega, st.m, alpha, st.n, st.k);
        k::sub_scaled_diff(st.y, omega, st.t, alpha, st.v, st.w);

        if (need_bounds) {
            const double extra_dl =
                std::abs(beta * omega_prev) * run.constants().norm_minv * pending_z_jump;
            pending_z_jump = 0.0;
            update_gap_bound(*run.bounds, PipelinedStepCoefficients{alpha, beta, omega, omega_prev},
                             local_error_bounds(ln, run.constants()), extra_dl);
        }
        r_norm = nrm(st.r);

        window.f_curr = run.bounds ? run.bounds->dr : 0.0;
        window.r_curr = r_norm;
        bool replaced = false;
        if (should_replace(rr, window, i + 1)) {
            Vector z_old;
            if (need_bounds) z_old = st.z;
            const OpCounts extra = perform_replacement(st, a, mp, b);
            run.result.ops.spmv += extra.spmv;
            run.result.ops.precond += extra.precond;
            r_norm = nrm(st.r);
            if (need_bounds) {
                k::sub(st.z, z_old, z_old);
                pending_z_jump = nrm(z_old);
                run.bounds = initial_gap_bounds(run.constants(), nrm(st.x), run.result.b_norm, r_norm,
                                                nrm(st.k), nrm(st.g), nrm(st.s), nrm(st.l));
            }
            replaced = true;
            run.result.replacements.push_back(i + 1);
        }
        if (r_norm < rr.stop_fraction * r0_norm) window.stop_reached = true;
        window.f_prev = run.bounds ? run.bounds->dr : 0.0;
        window.r_prev = r_norm;

        const double rho_new = k::dot(st.r0_shadow, st.r);
        const double r0w = k::dot(st.r0_shadow, st.w);
        const double r0s = k::dot(st.r0_shadow, st.s);
        const double r0z = k::dot(st.r0_shadow, st.z);
        st.dot_cache = {rho_new, r0w, r0s, r0z};
        run.precond(st.w, st.m);
        run.spmv(st.m, st.t);

        run.result.trace.push(alpha, beta, omega);
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
        const double beta_new = (alpha / omega) * rho_new / rho;
        const double denom = r0w + beta_new * r0s - beta_new * omega * r0z;
        if (!std::isfinite(beta_new) || run.negligible(denom, r0_sq)) {
            ++i;
            run.breakdown("alpha denominator vanished");
            break;
        }
        const double alpha_new = rho_new / denom;
        if (!std::isfinite(alpha_new)) {
            ++i;
            run.breakdown("alpha is not finite");
            break;
        }
        omega_prev = omega;
        alpha = alpha_new;
        beta = beta_new;
        rho = rho_new;
        st.alpha = alpha;
        st.beta = beta;
    }
    return run.finish(st, i);
}

}  // namespace krylov_gap
