#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "krylov_gap/csr.hpp"
#include "krylov_gap/precond.hpp"
#include "krylov_gap/solver_types.hpp"

namespace krylov_gap {

// ---------------------------------------------------------------------------
// Measured gaps

/// Fresh explicit evaluation of
///   gap_r = ||(b - A x) - r||, gap_s = ||A g - s||, gap_w = ||A k - w||,
///   gap_z = ||A l - z||,       gap_k = ||M^{-1} r - k||, gap_l = ||M^{-1} s - l||,
/// plus ||r|| and ||b - A x||. Empty slots give NaN. The state is not touched.
GapRecord measure_gaps(const SolverState& state, const CsrMatrix& a, const Preconditioner& m,
                       std::span<const double> b);

/// ||A|| and ||M^{-1}|| from power iteration times kNormSafetyFactor, mu and
/// mu_tilde from the row counts.
BoundConstants make_bound_constants(const CsrMatrix& a, const Preconditioner& m);

/// ((mu sqrt(N) + 1) ||A|| ||x|| + ||b||) eps: one explicit residual evaluation.
double residual_evaluation_bound(const BoundConstants& c, double x_norm, double b_norm);

/// mu sqrt(N) ||A|| ||v|| eps: one spmv.
double spmv_bound(const BoundConstants& c, double v_norm);

/// mu_tilde sqrt(N) ||M^{-1}|| ||v|| eps: one preconditioner application.
double precond_bound(const BoundConstants& c, double v_norm);

// ---------------------------------------------------------------------------
// Local rounding error bounds

/// Norms entering the local error bounds of one pipelined BiCGStab iteration i.
/// Products such as beta_g stand for ||beta_i g_{i-1}||; omega_prev products use
/// omega_{i-1}. Direction terms refer to the previous directions.
struct PipelinedLocalNorms {
    // g_i, s_i, l_i, z_i
    double k = 0, beta_g = 0, beta_omega_l = 0;
    double w = 0, beta_s = 0, beta_omega_z = 0;
    double m = 0, beta_l = 0, beta_omega_n = 0;
    double t = 0, beta_z = 0, beta_omega_v = 0;
    // q_i, u_i, y_i
    double r = 0, alpha_s = 0, alpha_l = 0, alpha_z = 0;
    // x_{i+1}, r_{i+1}, k_{i+1}, w_{i+1}
    double x = 0, alpha_g = 0, omega_u = 0;
    double q = 0, omega_y = 0;
    double u = 0, omega_m = 0, omega_w = 0, omega_alpha_n = 0, omega_alpha_z = 0;
    double y = 0, omega_t = 0, omega_alpha_v = 0;
};

struct PipelinedLocalBounds {
    double g = 0, x = 0, s = 0, r = 0, l = 0, z = 0, k = 0, w = 0, q = 0, u = 0, y = 0;
};

PipelinedLocalBounds local_error_bounds(const PipelinedLocalNorms& n, const BoundConstants& c);

/// Classic BiCGStab iteration i: q_i from r_i, x_{i+1} and r_{i+1}.
struct ClassicLocalNorms {
    double r = 0, alpha_s = 0, alpha_g = 0, alpha_p = 0;
    double x = 0, omega_u = 0, omega_q = 0;
    double q = 0, omega_y = 0;
};

struct ClassicLocalBounds {
    double q = 0, x = 0, r = 0;
};

ClassicLocalBounds local_error_bounds(const ClassicLocalNorms& n, const BoundConstants& c);

/// Classic CG iteration: x += alpha p, r -= alpha s with s = A p.
struct CgLocalNorms {
    double x = 0, alpha_p = 0, r = 0, alpha_s = 0;
};

struct CgLocalBounds {
    double x = 0, r = 0;
};

CgLocalBounds local_error_bounds(const CgLocalNorms& n, const BoundConstants& c);

/// Pipelined CG iteration i (u in place of k, q in place of l).
struct PipeCgLocalNorms {
    // p_i = u + beta p, s_i = w + beta s, q_i = m + beta q, z_i = n + beta z
    double u = 0, beta_p = 0, w = 0, beta_s = 0, m = 0, beta_q = 0, n = 0, beta_z = 0;
    // x, r, u, w updates
    double x = 0, alpha_p = 0, r = 0, alpha_s = 0, alpha_q = 0, alpha_z = 0;
};

struct PipeCgLocalBounds {
    double p = 0, s = 0, q = 0, z = 0, x = 0, r = 0, u = 0, w = 0;
    double m = 0;  // m_i = M^{-1} w_i
};

PipeCgLocalBounds local_error_bounds(const PipeCgLocalNorms& n, const BoundConstants& c);

// ---------------------------------------------------------------------------
// Running gap bounds

/// Running upper bounds on the gap norms: dr = f^r, dk = preconditioned
/// residual gap; ds, dz, dl belong to the current directions.
struct LocalBoundState {
    BoundConstants c;
    double dr = 0, ds = 0, dw = 0, dz = 0, dk = 0, dl = 0;
};

/// Fresh bounds after an explicit evaluation of r, k = M^{-1} r, w = A k and of
/// s = A g, l = M^{-1} s, z = A l (initialization or replacement).
LocalBoundState initial_gap_bounds(const BoundConstants& c, double x_norm, double b_norm,
                                   double r_norm, double k_norm, double g_norm, double s_norm,
                                   double l_norm);

struct PipelinedStepCoefficients {
    double alpha = 0, beta = 0, omega = 0, omega_prev = 0;
};

/// One pipelined BiCGStab iteration: directions first (dz, ds, dl for index i),
/// then dr, dw, dk for index i+1.
/// extra_dl adds to the l-gap, used for stale n after a replacement.
void update_gap_bound(LocalBoundState& b, const PipelinedStepCoefficients& k,
                      const PipelinedLocalBounds& local, double extra_dl = 0.0);

/// Classic BiCGStab: f^r += ||A|| b(x) + b(r) + b(q).
void update_gap_bound(LocalBoundState& b, const ClassicLocalBounds& local);

/// Classic CG: f^r += ||A|| b(x) + b(r).
void update_gap_bound(LocalBoundState& b, const CgLocalBounds& local);

/// Pipelined CG with alpha_i, beta_i.
void update_gap_bound(LocalBoundState& b, double alpha, double beta, const PipeCgLocalBounds& local);

/// Running bound on ||M^{-1} r_i - k_i||.
inline double preconditioned_gap_bound(const LocalBoundState& b) { return b.dk; }

// ---------------------------------------------------------------------------
// Error propagation matrices

/// Dense square row-major matrix, only used for diagnostics and oracles.
struct DenseMatrix {
    index_t n = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    explicit DenseMatrix(index_t n_) : n(n_), a(static_cast<std::size_t>(n_ * n_), 0.0) {}
    double& operator()(index_t r, index_t c) { return a[static_cast<std::size_t>(r * n + c)]; }
    double operator()(index_t r, index_t c) const { return a[static_cast<std::size_t>(r * n + c)]; }
};

DenseMatrix multiply(const DenseMatrix& x, const DenseMatrix& y);

struct PropagationMatrices {
    DenseMatrix A, B, E, P, C, D, O, U;
};

/// The (upto+1)^2 propagation matrices. Needs alphas/omegas up to upto-1 and
/// betas up to upto, so upto < trace.size().
PropagationMatrices propagation_matrices(const CoefficientTrace& trace, index_t upto);

enum class Product { U, OU, BA, UEA, BAEA, BPA, UC, BAC, BD };
inline constexpr std::size_t kProductCount = 9;
inline constexpr std::array<Product, kProductCount> kAllProducts{
    Product::U,   Product::OU, Product::BA,  Product::UEA, Product::BAEA,
    Product::BPA, Product::UC, Product::BAC, Product::BD};

std::string_view product_name(Product p);

using ProductColumnNorms = std::array<double, kProductCount>;

/// Max norms of column i (0-based) of the nine products, over rows >= row_start.
/// Uses O(i) operator applications; needs coefficients up to index i-1, so
/// i <= trace.size().
ProductColumnNorms product_column_norms(const CoefficientTrace& trace, index_t i,
                                        index_t row_start = 0);

/// Columns 0..trace.size(). Rows above the most recent replacement index are
/// zeroed, replacements being record indices in increasing order.
std::vector<ProductColumnNorms> product_column_norm_history(const CoefficientTrace& trace,
                                                            std::span<const index_t> replacements);

/// Products of the pipelined CG analysis {U, BA, UEA, BAEA}, obtained by
/// injecting unit errors into the scalar pipelined CG gap recursion.
using PcgProductColumnNorms = std::array<double, 4>;
PcgProductColumnNorms pcg_product_column_norms(std::span<const double> alphas,
                                               std::span<const double> betas, index_t i);

struct GapSeries {
    std::vector<double> r, s, w, z;
};

/// Scalar gaps of the coupled recursion with zero local errors from the given
/// initial gaps, advanced with the 4x4 system. Entries 0..upto; upto < trace.size().
GapSeries unroll_gap_system(const CoefficientTrace& trace, double r0, double s0, double w0,
                            double z0, index_t upto);

// ---------------------------------------------------------------------------
// Residual replacement

struct ReplacementWindow {
    double f_prev = 0, r_prev = 0;  // f^r_{i-1}, ||r_{i-1}||
    double f_curr = 0, r_curr = 0;  // f^r_i, ||r_i||
    double r0_norm = 0;
    bool stop_reached = false;      // ||r_j|| < stop_fraction ||r_0|| seen for some j <= i
};

bool should_replace(const ReplacementPolicy& policy, const ReplacementWindow& w, index_t i);

/// Pipelined BiCGStab: r = b - A x, k = M^{-1} r, w = A k, s = A g, l = M^{-1} s,
/// z = A l. Returns the kernel work done.
OpCounts perform_replacement(SolverState& state, const CsrMatrix& a, const Preconditioner& m,
                             std::span<const double> b);

/// Pipelined CG: r = b - A x, u = M^{-1} r, w = A u, s = A p, q = M^{-1} s, z = A q.
OpCounts perform_replacement_pcg(SolverState& state, const CsrMatrix& a, const Preconditioner& m,
                                 std::span<const double> b);

}  // namespace krylov_gap
