#include <algorithm>
#include <cmath>

#include "krylov_gap/stability.hpp"

namespace krylov_gap {
namespace {

// Operators of the propagation matrices of size n = y.size(), applied to a
// column vector. They read alphas/omegas up to n-2 and betas up to n-1.
class Ops {
public:
    explicit Ops(const CoefficientTrace& t) : t_(t) {}

    double alpha(index_t j) const { return t_.alphas[static_cast<std::size_t>(j)]; }
    double beta(index_t j) const { return t_.betas[static_cast<std::size_t>(j)]; }
    double omega(index_t j) const { return t_.omegas[static_cast<std::size_t>(j)]; }

    // Strictly upper operators with a constant row coefficient c_j:
    // out(j) = c_j * sum_{l>j} y(l).
    template <typename Coef>
    static Vector strict_upper(const Vector& y, Coef&& coef) {
        const index_t n = static_cast<index_t>(y.size());
        Vector out(y.size(), 0.0);
        double tail = 0.0;
        for (index_t j = n - 2; j >= 0; --j) {
            tail = tail + y[static_cast<std::size_t>(j + 1)];
            out[static_cast<std::size_t>(j)] = coef(j) * tail;
        }
        return out;
    }

    Vector A(const Vector& y) const { return strict_upper(y, [&](index_t j) { return -alpha(j); }); }
    Vector C(const Vector& y) const { return strict_upper(y, [&](index_t j) { return -omega(j); }); }
    Vector D(const Vector& y) const {
        return strict_upper(y, [&](index_t j) { return omega(j) * alpha(j); });
    }

    Vector B(const Vector& y) const {
        const index_t n = static_cast<index_t>(y.size());
        Vector out(y.size(), 0.0);
        if (n == 0) return out;
        out[static_cast<std::size_t>(n - 1)] = y[static_cast<std::size_t>(n - 1)];
        for (index_t j = n - 2; j >= 0; --j) {
            out[static_cast<std::size_t>(j)] =
                y[static_cast<std::size_t>(j)] + beta(j + 1) * out[static_cast<std::size_t>(j + 1)];
        }
        return out;
    }

    Vector E(const Vector& y) const {
        Vector out = B(y);
        if (!out.empty()) out[0] = 0.0;
        return out;
    }

    // P(j,k) = -omega_j B(j,k) for k > j, i.e. -omega_j beta_{j+1} (B y)(j+1).
    Vector P(const Vector& y) const {
        const index_t n = static_cast<index_t>(y.size());
        const Vector by = B(y);
        Vector out(y.size(), 0.0);
        for (index_t j = 0; j + 1 < n; ++j) {
            out[static_cast<std::size_t>(j)] =
                -omega(j) * (beta(j + 1) * by[static_cast<std::size_t>(j + 1)]);
        }
        return out;
    }

    static Vector U(const Vector& y) {
        Vector out(y.size(), 0.0);
        double tail = 0.0;
        for (std::size_t j = y.size(); j-- > 0;) {
            tail = tail + y[j];
            out[j] = tail;
        }
        return out;
    }

private:
    const CoefficientTrace& t_;
};

double max_abs_from(const Vector& v, index_t row_start) {
    double m = 0.0;
    for (index_t j = std::max<index_t>(row_start, 0); j < static_cast<index_t>(v.size()); ++j) {
        const double a = std::abs(v[static_cast<std::size_t>(j)]);
        if (std::isnan(a)) return a;
        m = std::max(m, a);
    }
    return m;
}

void require_trace(const CoefficientTrace& t) {
    if (t.betas.size() != t.alphas.size() || t.omegas.size() != t.alphas.size()) {
        throw DimensionError("coefficient trace: alphas, betas and omegas differ in length");
    }
}

}  // namespace

DenseMatrix multiply(const DenseMatrix& x, const DenseMatrix& y) {
    require_same_size(static_cast<std::size_t>(x.n), static_cast<std::size_t>(y.n), "multiply");
    DenseMatrix out(x.n);
    for (index_t r = 0; r < x.n; ++r) {
        for (index_t c = 0; c < x.n; ++c) {
            double acc = 0.0;
            for (index_t k = 0; k < x.n; ++k) acc = acc + x(r, k) * y(k, c);
            out(r, c) = acc;
        }
    }
    return out;
}

PropagationMatrices propagation_matrices(const CoefficientTrace& trace, index_t upto) {
    require_trace(trace);
    if (upto < 0 || upto >= trace.size()) {
        throw DimensionError("propagation_matrices: upto must be below the trace length");
    }
    const index_t n = upto + 1;
    PropagationMatrices pm{DenseMatrix(n), DenseMatrix(n), DenseMatrix(n), DenseMatrix(n),
                           DenseMatrix(n), DenseMatrix(n), DenseMatrix(n), DenseMatrix(n)};
    const auto& al = trace.alphas;
    const auto& be = trace.betas;
    const auto& om = trace.omegas;
    for (index_t j = 0; j < n; ++j) {
        double prod = 1.0;
        for (index_t k = j; k < n; ++k) {
            if (k > j) prod = prod * be[static_cast<std::size_t>(k)];
            pm.B(j, k) = prod;
            pm.E(j, k) = j == 0 ? 0.0 : prod;
            pm.U(j, k) = 1.0;
            if (k > j) {
                const std::size_t sj = static_cast<std::size_t>(j);
                pm.A(j, k) = -al[sj];
                pm.P(j, k) = -(om[sj] * prod);
                pm.C(j, k) = -om[sj];
                pm.D(j, k) = om[sj] * al[sj];
            }
        }
        pm.O(j, j) = j == 0 ? 0.0 : -om[static_cast<std::size_t>(j - 1)];
    }
    return pm;
}

std::string_view product_name(Product p) {
    switch (p) {
        case Product::U: return "U";
        case Product::OU: return "OU";
        case Product::BA: return "BA";
        case Product::UEA: return "UEA";
        case Product::BAEA: return "BAEA";
        case Product::BPA: return "BPA";
        case Product::UC: return "UC";
        case Product::BAC: return "BAC";
        case Product::BD: return "BD";
    }
    return "?";
}

ProductColumnNorms product_column_norms(const CoefficientTrace& trace, index_t i, index_t row_start) {
    require_trace(trace);
    if (i < 0 || i > trace.size()) throw DimensionError("product_column_norms: column out of range");
    ProductColumnNorms out{};
    const auto idx = [](Product p) { return static_cast<std::size_t>(p); };
    out[idx(Product::U)] = row_start <= i ? 1.0 : 0.0;
    if (i == 0) return out;

    const Ops ops(trace);
    // O U: diagonal -omega_{j-1} for j = 1..i.
    double ou = 0.0;
    for (index_t j = std::max<index_t>(row_start, 1); j <= i; ++j) {
        ou = std::max(ou, std::abs(trace.omegas[static_cast<std::size_t>(j - 1)]));
    }
    out[idx(Product::OU)] = ou;

    // Column i of the strictly upper right factors; row i is zero and dropped.
    Vector a_col(static_cast<std::size_t>(i)), c_col(a_col.size()), d_col(a_col.size());
    for (index_t j = 0; j < i; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        a_col[sj] = -trace.alphas[sj];
        c_col[sj] = -trace.omegas[sj];
        d_col[sj] = trace.omegas[sj] * trace.alphas[sj];
    }
    const Vector ea = ops.E(a_col);
    out[idx(Product::BA)] = max_abs_from(ops.B(a_col), row_start);
    out[idx(Product::UEA)] = max_abs_from(Ops::U(ea), row_start);
    out[idx(Product::BAEA)] = max_abs_from(ops.B(ops.A(ea)), row_start);
    out[idx(Product::BPA)] = max_abs_from(ops.B(ops.P(a_col)), row_start);
    out[idx(Product::UC)] = max_abs_from(Ops::U(c_col), row_start);
    out[idx(Product::BAC)] = max_abs_from(ops.B(ops.A(c_col)), row_start);
    out[idx(Product::BD)] = max_abs_from(ops.B(d_col), row_start);
    return out;
}

std::vector<ProductColumnNorms> product_column_norm_history(const CoefficientTrace& trace,
                                                            std::span<const index_t> replacements) {
    std::vector<ProductColumnNorms> out;
    out.reserve(static_cast<std::size_t>(trace.size()) + 1);
    std::size_t next = 0;
    index_t row_start = 0;
    for (index_t i = 0; i <= trace.size(); ++i) {
        while (next < replacements.size() && replacements[next] <= i) row_start = replacements[next++];
        out.push_back(product_column_norms(trace, i, row_start));
    }
    return out;
}

PcgProductColumnNorms pcg_product_column_norms(std::span<const double> alphas,
                                               std::span<const double> betas, index_t i) {
    if (i < 0 || static_cast<std::size_t>(i) > alphas.size() || betas.size() < alphas.size()) {
        throw DimensionError("pcg_product_column_norms: column out of range");
    }
    const auto al = [&](index_t j) { return alphas[static_cast<std::size_t>(j)]; };
    const auto be = [&](index_t j) { return betas[static_cast<std::size_t>(j)]; };
    PcgProductColumnNorms out{1.0, 0.0, 0.0, 0.0};
    // For each injection row j, run the scalar pipelined CG gap recursion
    //   r_{m+1} = r_m - alpha_m s_m, w_{m+1} = w_m - alpha_m z_m,
    //   s_m = w_m + beta_m s_{m-1} (m >= 1), z_m = beta_m z_{m-1},
    // with a unit error entering s, w or z at index j, and read off r_i.
    enum Slot { S, W, Z };
    const auto contribution = [&](Slot slot, index_t j) {
        double r = 0.0, s = 0.0, w = 0.0, z = 0.0;  // w holds w_m, s and z hold index m-1
        for (index_t m = 0; m < i; ++m) {
            const double hit = m == j ? 1.0 : 0.0;
            if (slot == W) w = w + hit;
            z = (m > 0 ? be(m) * z : 0.0) + (slot == Z ? hit : 0.0);
            s = (m > 0 ? w + be(m) * s : 0.0) + (slot == S ? hit : 0.0);
            r = r - al(m) * s;
            w = w - al(m) * z;
        }
        return r;
    };
    for (index_t j = 0; j <= i; ++j) {
        out[1] = std::max(out[1], std::abs(contribution(S, j)));
        out[2] = std::max(out[2], std::abs(contribution(W, j)));
        out[3] = std::max(out[3], std::abs(contribution(Z, j)));
    }
    return out;
}

GapSeries unroll_gap_system(const CoefficientTrace& trace, double r0, double s0, double w0, double z0,
                            index_t upto) {
    require_trace(trace);
    if (upto < 0 || upto >= trace.size()) {
        throw DimensionError("unroll_gap_system: upto must be below the trace length");
    }
    const std::size_t n = static_cast<std::size_t>(upto) + 1;
    GapSeries g{Vector(n), Vector(n), Vector(n), Vector(n)};
    g.r[0] = r0;
    g.s[0] = s0;
    g.w[0] = w0;
    g.z[0] = z0;
    const auto al = [&](index_t j) { return trace.alphas[static_cast<std::size_t>(j)]; };
    const auto be = [&](index_t j) { return trace.betas[static_cast<std::size_t>(j)]; };
    const auto om = [&](index_t j) { return trace.omegas[static_cast<std::size_t>(j)]; };
    if (upto == 0) return g;
    g.r[1] = r0 - al(0) * s0 - om(0) * w0 + om(0) * al(0) * z0;
    g.w[1] = w0 - al(0) * z0;
    for (index_t i = 1; i <= upto; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double a = al(i), b = be(i), o = om(i), op = om(i - 1);
        const double ri = g.r[si], sp = g.s[si - 1], wi = g.w[si], zp = g.z[si - 1];
        g.s[si] = b * sp + wi - b * op * zp;
        g.z[si] = b * zp;
        if (i < upto) {
            g.r[si + 1] = ri - a * b * sp - (a + o) * wi + a * b * (o + op) * zp;
            g.w[si + 1] = wi - a * b * zp;
        }
    }
    return g;
}

}  // namespace krylov_gap
