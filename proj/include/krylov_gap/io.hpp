#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "krylov_gap/csr.hpp"

namespace krylov_gap::io {

/// Shortest decimal string that parses back to the same binary64.
std::string format_double(double v);

/// Inverse of format_double; accepts "nan", "inf" and "-inf". Throws ConfigError.
double parse_double(std::string_view s);

/// Reads "%%MatrixMarket matrix coordinate real general|symmetric".
/// Symmetric files are expanded to both triangles.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);

enum class MatrixMarketSymmetry { general, symmetric };

/// symmetric writes the lower triangle only and requires a bitwise symmetric matrix.
void write_matrix_market(std::ostream& out, const CsrMatrix& a,
                         MatrixMarketSymmetry symmetry = MatrixMarketSymmetry::general);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a,
                         MatrixMarketSymmetry symmetry = MatrixMarketSymmetry::general);

/// One value per line.
Vector read_vector(std::istream& in);
Vector read_vector(const std::filesystem::path& path);
void write_vector(std::ostream& out, std::span<const double> v);
void write_vector(const std::filesystem::path& path, std::span<const double> v);

}  // namespace krylov_gap::io
