#include "krylov_gap/stencil.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <tuple>
#include <vector>

namespace krylov_gap {
namespace {

struct Leg {
    int dx, dy, dz;
    double weight;
};

constexpr std::array<ProblemInfo, 5> kProblems{{
    {ProblemId::TP1, "2D 5pt", true, true, 200, 200, 1, std::nullopt, true, false},
    {ProblemId::TP2, "2D 5pt", false, true, 1000, 1000, 1, 1e-3, false, false},
    {ProblemId::TP3, "2D 5pt", true, false, 500, 500, 1, 5e-4, true, false},
    {ProblemId::TP4, "2D 9pt", true, true, 200, 200, 1, std::nullopt, true, false},
    {ProblemId::TP5, "3D 7pt", true, false, 50, 50, 50, 1e-2, true, true},
}};

std::vector<Leg> legs_for(const StencilSpec& s) {
    const double e = s.epsilon;
    switch (s.problem_id) {
        case ProblemId::TP1:
            return {{0, -1, 0, -1.0}, {-1, 0, 0, -1.0}, {0, 0, 0, 4.0}, {1, 0, 0, -1.0}, {0, 1, 0, -1.0}};
        case ProblemId::TP2:
            // Legs pointing to a higher grid index carry -1+eps.
            return {{0, -1, 0, -1.0},
                    {-1, 0, 0, -1.0},
                    {0, 0, 0, 4.0},
                    {1, 0, 0, -1.0 + e},
                    {0, 1, 0, -1.0 + e}};
        case ProblemId::TP3:
            return {{0, -1, 0, -1.0}, {-1, 0, 0, -1.0}, {0, 0, 0, 4.0 - e}, {1, 0, 0, -1.0}, {0, 1, 0, -1.0}};
        case ProblemId::TP4:
            return {{-1, -1, 0, -1.0}, {0, -1, 0, -4.0}, {1, -1, 0, -1.0}, {-1, 0, 0, -4.0}, {0, 0, 0, 20.0},
                    {1, 0, 0, -4.0},   {-1, 1, 0, -1.0}, {0, 1, 0, -4.0},  {1, 1, 0, -1.0}};
        case ProblemId::TP5:
            return {{0, 0, -1, -1.0}, {0, -1, 0, -1.0}, {-1, 0, 0, -1.0}, {0, 0, 0, 6.0 - e},
                    {1, 0, 0, -1.0},  {0, 1, 0, -1.0},  {0, 0, 1, -1.0}};
    }
    throw ConfigError("stencil_matrix: unknown problem id");
}

}  // namespace

std::string_view problem_name(ProblemId id) {
    switch (id) {
        case ProblemId::TP1: return "TP1";
        case ProblemId::TP2: return "TP2";
        case ProblemId::TP3: return "TP3";
        case ProblemId::TP4: return "TP4";
        case ProblemId::TP5: return "TP5";
    }
    return "?";
}

ProblemId parse_problem_id(std::string_view s) {
    std::string up(s);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& p : kProblems) {
        if (up == problem_name(p.id)) return p.id;
    }
    throw ConfigError("unknown problem id: " + std::string(s));
}

const ProblemInfo& problem_info(ProblemId id) {
    for (const auto& p : kProblems) {
        if (p.id == id) return p;
    }
    throw ConfigError("unknown problem id");
}

StencilSpec StencilSpec::defaults(ProblemId id) {
    const ProblemInfo& info = problem_info(id);
    StencilSpec s;
    s.problem_id = id;
    s.nx = info.nx;
    s.ny = info.ny;
    s.nz = info.nz;
    s.epsilon = info.epsilon.value_or(0.0);
    s.normalize = true;
    return s;
}

index_t StencilSpec::size() const {
    const bool three_d = problem_info(problem_id).three_dimensional;
    return nx * ny * (three_d ? nz : 1);
}

CsrMatrix stencil_matrix(const StencilSpec& spec) {
    const ProblemInfo& info = problem_info(spec.problem_id);
    const index_t nz = info.three_dimensional ? spec.nz : 1;
    if (spec.nx < 2 || spec.ny < 2 || (info.three_dimensional && spec.nz < 2)) {
        throw ConfigError("stencil_matrix: grid counts must be >= 2");
    }
    if (info.epsilon.has_value() && !(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
        throw ConfigError("stencil_matrix: epsilon must lie in (0, 1)");
    }
    std::vector<Leg> legs = legs_for(spec);
    // Column order for an x-fastest grid.
    std::sort(legs.begin(), legs.end(), [](const Leg& a, const Leg& b) {
        return std::tie(a.dz, a.dy, a.dx) < std::tie(b.dz, b.dy, b.dx);
    });

    const index_t n = spec.nx * spec.ny * nz;
    std::vector<index_t> offsets;
    std::vector<index_t> cols;
    std::vector<double> vals;
    offsets.reserve(static_cast<std::size_t>(n) + 1);
    cols.reserve(static_cast<std::size_t>(n) * legs.size());
    vals.reserve(static_cast<std::size_t>(n) * legs.size());
    offsets.push_back(0);
    for (index_t iz = 0; iz < nz; ++iz) {
        for (index_t iy = 0; iy < spec.ny; ++iy) {
            for (index_t ix = 0; ix < spec.nx; ++ix) {
                for (const Leg& leg : legs) {
                    const index_t jx = ix + leg.dx;
                    const index_t jy = iy + leg.dy;
                    const index_t jz = iz + leg.dz;
                    if (jx < 0 || jx >= spec.nx || jy < 0 || jy >= spec.ny || jz < 0 || jz >= nz) continue;
                    cols.push_back(jx + spec.nx * (jy + spec.ny * jz));
                    vals.push_back(leg.weight);
                }
                offsets.push_back(static_cast<index_t>(cols.size()));
            }
        }
    }
    CsrMatrix a(n, n, std::move(offsets), std::move(cols), std::move(vals));
    if (spec.normalize) return normalize_matrix(a).matrix;
    return a;
}

NormalizedMatrix normalize_matrix(const CsrMatrix& a) {
    const NormEstimate est = estimate_two_norm(a);
    NormalizedMatrix out;
    out.original_norm = est.value;
    out.norm_converged = est.converged;
    out.matrix = scale_matrix(a, 1.0 / est.value);
    return out;
}

Vector manufactured_rhs(const CsrMatrix& a) {
    const Vector x_ex(static_cast<std::size_t>(a.n_cols()),
                      1.0 / std::sqrt(static_cast<double>(a.n_cols())));
    return spmv(a, x_ex);
}

}  // namespace krylov_gap
