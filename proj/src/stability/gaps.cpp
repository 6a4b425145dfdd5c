#include <cmath>

#include "krylov_gap/kernels.hpp"
#include "krylov_gap/stability.hpp"

namespace krylov_gap {
namespace {

bool has(const Vector& v) { return !v.empty(); }

// ||op(x) - y|| with op applied into scratch.
template <typename Op>
double gap_norm(const Vector& x, const Vector& y, Vector& scratch, Op&& op) {
    scratch.resize(x.size());
    op(x, scratch);
    kernels::sub(scratch, y, scratch);
    return norm2(scratch);
}

}  // namespace

GapRecord measure_gaps(const SolverState& st, const CsrMatrix& a, const Preconditioner& m,
                       std::span<const double> b) {
    GapRecord rec;
    rec.i = st.iteration;
    const auto apply_a = [&](const Vector& in, Vector& out) { spmv_into(a, in, out); };
    const auto apply_m = [&](const Vector& in, Vector& out) { m.apply(in, out); };
    Vector scratch;
    if (has(st.r)) rec.recursive_residual_norm = norm2(st.r);
    if (has(st.x)) {
        Vector res(st.x.size());
        spmv_into(a, st.x, res);
        kernels::sub(b, res, res);
        rec.true_residual_norm = norm2(res);
        if (has(st.r)) {
            kernels::sub(res, st.r, res);
            rec.gap_r = norm2(res);
        }
    }
    if (has(st.g) && has(st.s)) rec.gap_s = gap_norm(st.g, st.s, scratch, apply_a);
    if (has(st.k) && has(st.w)) rec.gap_w = gap_norm(st.k, st.w, scratch, apply_a);
    if (has(st.l) && has(st.z)) rec.gap_z = gap_norm(st.l, st.z, scratch, apply_a);
    if (has(st.r) && has(st.k)) rec.gap_k = gap_norm(st.r, st.k, scratch, apply_m);
    if (has(st.s) && has(st.l)) rec.gap_l = gap_norm(st.s, st.l, scratch, apply_m);
    return rec;
}

BoundConstants make_bound_constants(const CsrMatrix& a, const Preconditioner& m) {
    BoundConstants c;
    c.norm_a = estimate_two_norm(a).value * kNormSafetyFactor;
    c.norm_minv = (m.is_identity() ? 1.0 : estimate_preconditioner_norm(m).value) * kNormSafetyFactor;
    c.mu = static_cast<double>(max_row_nnz(a));
    c.mu_tilde = static_cast<double>(m.mu_tilde());
    c.sqrt_n = std::sqrt(static_cast<double>(a.n_rows()));
    c.eps = kUnitRoundoff;
    return c;
}

double residual_evaluation_bound(const BoundConstants& c, double x_norm, double b_norm) {
    return ((c.mu * c.sqrt_n + 1.0) * c.norm_a * x_norm + b_norm) * c.eps;
}

double spmv_bound(const BoundConstants& c, double v_norm) {
    return c.mu * c.sqrt_n * c.norm_a * v_norm * c.eps;
}

double precond_bound(const BoundConstants& c, double v_norm) {
    return c.mu_tilde * c.sqrt_n * c.norm_minv * v_norm * c.eps;
}

PipelinedLocalBounds local_error_bounds(const PipelinedLocalNorms& n, const BoundConstants& c) {
    const double sa = c.mu * c.sqrt_n * c.norm_a;          // spmv factor
    const double sm = c.mu_tilde * c.sqrt_n * c.norm_minv;  // preconditioner factor
    const double sam = c.norm_a * sm;
    const double e = c.eps;
    PipelinedLocalBounds b;
    b.g = (n.k + 3 * n.beta_g + 4 * n.beta_omega_l) * e;
    b.x = (2 * n.x + 3 * n.alpha_g + 2 * n.omega_u) * e;
    b.s = (n.w + 3 * n.beta_s + 4 * n.beta_omega_z) * e;
    b.r = (n.q + 2 * n.omega_y) * e;
    b.l = (n.m + sm * n.w + 3 * n.beta_l + 4 * n.beta_omega_n + sm * n.beta_omega_z) * e;
    b.z = (n.t + sa * n.m + sam * n.w + 3 * n.beta_z + 4 * n.beta_omega_v + sa * n.beta_omega_n +
           sam * n.beta_omega_z) *
          e;
    b.k = (n.u + 3 * n.omega_m + sm * n.omega_w + 4 * n.omega_alpha_n + sm * n.omega_alpha_z) * e;
    b.w = (n.y + 3 * n.omega_t + sa * n.omega_m + sam * n.omega_w + 4 * n.omega_alpha_v +
           sa * n.omega_alpha_n + sam * n.omega_alpha_z) *
          e;
    b.q = (n.r + 2 * n.alpha_s) * e;
    b.u = (n.k + 2 * n.alpha_l) * e;
    b.y = (n.w + 2 * n.alpha_z) * e;
    return b;
}

ClassicLocalBounds local_error_bounds(const ClassicLocalNorms& n, const BoundConstants& c) {
    const double sa = c.mu * c.sqrt_n * c.norm_a;
    const double sm = c.mu_tilde * c.sqrt_n * c.norm_minv;
    const double sam = c.norm_a * sm;
    ClassicLocalBounds b;
    b.q = (n.r + 2 * n.alpha_s + sa * n.alpha_g + sam * n.alpha_p) * c.eps;
    b.x = (2 * n.x + 3 * n.alpha_g + sm * n.alpha_p + 2 * n.omega_u + sm * n.omega_q) * c.eps;
    b.r = (n.q + 2 * n.omega_y + sa * n.omega_u + sam * n.omega_q) * c.eps;
    return b;
}

CgLocalBounds local_error_bounds(const CgLocalNorms& n, const BoundConstants& c) {
    const double sa = c.mu * c.sqrt_n * c.norm_a;
    CgLocalBounds b;
    b.x = (n.x + 2 * n.alpha_p) * c.eps;
    b.r = (n.r + 2 * n.alpha_s + sa * n.alpha_p) * c.eps;
    return b;
}

PipeCgLocalBounds local_error_bounds(const PipeCgLocalNorms& n, const BoundConstants& c) {
    const double sa = c.mu * c.sqrt_n * c.norm_a;
    const double sm = c.mu_tilde * c.sqrt_n * c.norm_minv;
    PipeCgLocalBounds b;
    b.p = (n.u + 2 * n.beta_p) * c.eps;
    b.s = (n.w + 2 * n.beta_s) * c.eps;
    b.q = (n.m + 2 * n.beta_q) * c.eps;
    b.m = sm * n.w * c.eps;
    b.z = (n.n + 2 * n.beta_z + sa * n.m) * c.eps;
    b.x = (n.x + 2 * n.alpha_p) * c.eps;
    b.r = (n.r + 2 * n.alpha_s) * c.eps;
    b.u = (n.u + 2 * n.alpha_q) * c.eps;
    b.w = (n.w + 2 * n.alpha_z) * c.eps;
    return b;
}

LocalBoundState initial_gap_bounds(const BoundConstants& c, double x_norm, double b_norm,
                                   double r_norm, double k_norm, double g_norm, double s_norm,
                                   double l_norm) {
    LocalBoundState b;
    b.c = c;
    b.dr = residual_evaluation_bound(c, x_norm, b_norm);
    b.dk = precond_bound(c, r_norm);
    b.dw = spmv_bound(c, k_norm);
    b.ds = spmv_bound(c, g_norm);
    b.dl = precond_bound(c, s_norm);
    b.dz = spmv_bound(c, l_norm);
    return b;
}

void update_gap_bound(LocalBoundState& b, const PipelinedStepCoefficients& k,
                      const PipelinedLocalBounds& local, double extra_dl) {
    const double na = b.c.norm_a;
    const double nm = b.c.norm_minv;
    const double abeta = std::abs(k.beta);
    const double aalpha = std::abs(k.alpha);
    const double aomega = std::abs(k.omega);
    // Directions of iteration i.
    const double dz = abeta * b.dz + na * local.l + local.z;
    const double ds = b.dw + abeta * b.ds + std::abs(k.beta * k.omega_prev) * b.dz + na * local.g + local.s;
    const double dl = abeta * b.dl + nm * local.s + local.l + extra_dl;
    // Iterates of index i+1.
    b.dr = b.dr + aalpha * ds + aomega * b.dw + std::abs(k.omega * k.alpha) * dz + na * local.x + local.r +
           aomega * na * local.u + local.q + aomega * local.y;
    b.dw = b.dw + aalpha * dz + na * local.k + local.w + na * local.u + local.y;
    b.dk = b.dk + aalpha * dl + nm * (local.r + local.q + aomega * local.y) + local.k + local.u;
    b.dz = dz;
    b.ds = ds;
    b.dl = dl;
}

void update_gap_bound(LocalBoundState& b, const ClassicLocalBounds& local) {
    b.dr = b.dr + b.c.norm_a * local.x + local.r + local.q;
}

void update_gap_bound(LocalBoundState& b, const CgLocalBounds& local) {
    b.dr = b.dr + b.c.norm_a * local.x + local.r;
}

void update_gap_bound(LocalBoundState& b, double alpha, double beta, const PipeCgLocalBounds& local) {
    const double na = b.c.norm_a;
    const double nm = b.c.norm_minv;
    const double abeta = std::abs(beta);
    const double aalpha = std::abs(alpha);
    const double dz = abeta * b.dz + na * local.q + local.z;
    const double ds = b.dw + abeta * b.ds + na * local.p + local.s;
    const double dl = abeta * b.dl + nm * local.s + local.q + local.m;
    b.dr = b.dr + aalpha * ds + na * local.x + local.r;
    b.dw = b.dw + aalpha * dz + na * local.u + local.w;
    b.dk = b.dk + aalpha * dl + nm * local.r + local.u;
    b.dz = dz;
    b.ds = ds;
    b.dl = dl;
}

bool should_replace(const ReplacementPolicy& policy, const ReplacementWindow& w, index_t i) {
    switch (policy.kind) {
        case ReplacementPolicy::Kind::none:
            return false;
        case ReplacementPolicy::Kind::periodic:
            return !w.stop_reached && i > 0 && i % policy.period == 0 &&
                   w.r_curr >= policy.stop_fraction * w.r0_norm;
        case ReplacementPolicy::Kind::automated:
            return w.f_prev <= policy.tau * w.r_prev && w.f_curr > policy.tau * w.r_curr;
    }
    return false;
}

OpCounts perform_replacement(SolverState& st, const CsrMatrix& a, const Preconditioner& m,
                             std::span<const double> b) {
    spmv_into(a, st.x, st.r);
    kernels::sub(b, st.r, st.r);
    m.apply(st.r, st.k);
    spmv_into(a, st.k, st.w);
    spmv_into(a, st.g, st.s);
    m.apply(st.s, st.l);
    spmv_into(a, st.l, st.z);
    return OpCounts{4, 2};
}

OpCounts perform_replacement_pcg(SolverState& st, const CsrMatrix& a, const Preconditioner& m,
                                 std::span<const double> b) {
    // Same six evaluations under the slot mapping u -> k, p -> g, q -> l.
    return perform_replacement(st, a, m, b);
}

}  // namespace krylov_gap
