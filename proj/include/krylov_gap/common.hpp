#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace krylov_gap {

using index_t = std::int64_t;

/// Dense binary64 vector. All kernels treat it as a plain contiguous array.
using Vector = std::vector<double>;

/// Unit roundoff of binary64, 2^-53.
inline constexpr double kUnitRoundoff = 0x1p-53;

/// sqrt of the unit roundoff, 2^-26.5.
inline const double kSqrtUnitRoundoff = std::sqrt(kUnitRoundoff);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid parameters passed by the caller (grid sizes, policies, files).
class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

}  // namespace krylov_gap
