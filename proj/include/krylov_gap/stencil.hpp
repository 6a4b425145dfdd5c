#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "krylov_gap/csr.hpp"

namespace krylov_gap {

enum class ProblemId { TP1, TP2, TP3, TP4, TP5 };

std::string_view problem_name(ProblemId id);

/// Parses "TP1".."TP5" (case-insensitive). Throws ConfigError otherwise.
ProblemId parse_problem_id(std::string_view s);

struct ProblemInfo {
    ProblemId id;
    std::string_view stencil_type;  // "2D 5pt", "2D 9pt", "3D 7pt"
    bool symmetric;
    bool positive_definite;
    index_t nx, ny, nz;  // reference grid; nz = 1 for 2D problems
    std::optional<double> epsilon;
    bool icc0_by_default;
    bool three_dimensional;
};

const ProblemInfo& problem_info(ProblemId id);

struct StencilSpec {
    ProblemId problem_id = ProblemId::TP1;
    index_t nx = 200;
    index_t ny = 200;
    index_t nz = 1;
    double epsilon = 0.0;
    bool normalize = true;

    /// Reference grid and stencil parameter for the problem.
    static StencilSpec defaults(ProblemId id);

    index_t size() const;
};

/// Finite-difference matrix on an x-fastest grid. Stencil legs that leave the
/// grid are dropped (homogeneous Dirichlet). When spec.normalize is set the
/// result is scaled by 1/estimate_two_norm.
CsrMatrix stencil_matrix(const StencilSpec& spec);

struct NormalizedMatrix {
    CsrMatrix matrix;
    double original_norm = 0.0;
    bool norm_converged = false;
};

NormalizedMatrix normalize_matrix(const CsrMatrix& a);

/// b = A x_ex with x_ex = 1/sqrt(N) everywhere.
Vector manufactured_rhs(const CsrMatrix& a);

}  // namespace krylov_gap
