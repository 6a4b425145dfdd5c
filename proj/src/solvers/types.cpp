#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "krylov_gap/solver_types.hpp"

namespace krylov_gap {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string_view solver_name(SolverKind k) {
    switch (k) {
        case SolverKind::cg: return "cg";
        case SolverKind::pcg_pipelined: return "pcg_pipelined";
        case SolverKind::bicgstab: return "bicgstab";
        case SolverKind::bicgstab_pipelined: return "bicgstab_pipelined";
    }
    return "?";
}

SolverKind parse_solver_kind(std::string_view s) {
    const std::string v = lower(s);
    if (v == "cg") return SolverKind::cg;
    if (v == "pcg_pipelined" || v == "pcg" || v == "pipecg") return SolverKind::pcg_pipelined;
    if (v == "bicgstab") return SolverKind::bicgstab;
    if (v == "bicgstab_pipelined" || v == "pbicgstab") return SolverKind::bicgstab_pipelined;
    throw ConfigError("unknown solver: " + std::string(s));
}

std::string_view status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max_iters";
        case SolveStatus::breakdown: return "breakdown";
        case SolveStatus::stagnation: return "stagnation";
    }
    return "?";
}

SolveStatus parse_status(std::string_view s) {
    for (SolveStatus st : {SolveStatus::converged, SolveStatus::max_iters, SolveStatus::breakdown,
                           SolveStatus::stagnation}) {
        if (s == status_name(st)) return st;
    }
    throw ConfigError("unknown solve status: " + std::string(s));
}

void SolveOptions::validate() const {
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(breakdown_eps >= 0.0)) throw ConfigError("breakdown_eps must be >= 0");
    if (stagnation_window < 1) throw ConfigError("stagnation_window must be >= 1");
}

void ReplacementPolicy::validate() const {
    if (kind == Kind::periodic && period < 1) throw ConfigError("replacement period must be >= 1");
    if (kind == Kind::automated && !(tau > 0.0)) throw ConfigError("replacement tau must be > 0");
}

ReplacementPolicy parse_replacement_policy(std::string_view s) {
    const std::string v = lower(s);
    if (v == "none") return ReplacementPolicy::none();
    if (v == "auto" || v == "automated") return ReplacementPolicy::automated();
    constexpr std::string_view prefix = "periodic:";
    if (v.rfind(prefix, 0) == 0) {
        index_t p = 0;
        const char* first = v.data() + prefix.size();
        const char* last = v.data() + v.size();
        const auto res = std::from_chars(first, last, p);
        if (res.ec != std::errc() || res.ptr != last || p < 1) {
            throw ConfigError("bad replacement period in '" + std::string(s) + "'");
        }
        return ReplacementPolicy::periodic(p);
    }
    throw ConfigError("unknown replacement policy: " + std::string(s));
}

std::string format_replacement_policy(const ReplacementPolicy& p) {
    switch (p.kind) {
        case ReplacementPolicy::Kind::none: return "none";
        case ReplacementPolicy::Kind::automated: return "auto";
        case ReplacementPolicy::Kind::periodic: return "periodic:" + std::to_string(p.period);
    }
    return "none";
}

}  // namespace krylov_gap
