#include <cmath>
#include <cstdio>
#include <sstream>

#include "krylov_gap/harness.hpp"

namespace krylov_gap::harness {
namespace {

std::string sci(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

}  // namespace

std::vector<RunSummary> compare_runs(const std::vector<ConvergenceHistory>& histories,
                                     const std::vector<std::string>& labels) {
    if (histories.size() < 2) throw ConfigError("compare needs at least two runs");
    if (!labels.empty() && labels.size() != histories.size()) {
        throw ConfigError("compare: one label per run expected");
    }
    const RunInfo& first = histories.front().info;
    std::vector<RunSummary> out;
    for (std::size_t k = 0; k < histories.size(); ++k) {
        const ConvergenceHistory& h = histories[k];
        if (h.info.problem != first.problem || h.info.n != first.n) {
            throw ConfigError("compare: runs are on different problems (" + first.problem + " N=" +
                              std::to_string(first.n) + " vs " + h.info.problem +
                              " N=" + std::to_string(h.info.n) + ")");
        }
        if (h.rows.empty()) throw ConfigError("compare: empty history");
        RunSummary s;
        s.label = labels.empty() ? h.info.solver + " " + h.info.policy : labels[k];
        s.solver = h.info.solver;
        s.policy = h.info.policy;
        s.final_true_residual = h.rows.back().record.true_residual_norm;
        s.min_true_residual = HUGE_VAL;
        for (const HistoryRow& r : h.rows) {
            s.min_true_residual = std::min(s.min_true_residual, r.record.true_residual_norm);
            if (!s.iterations_to_tol && r.record.true_residual_norm <= h.info.tol * h.info.b_norm) {
                s.iterations_to_tol = r.record.i;
            }
            for (double c : r.col_norms) {
                if (std::isfinite(c)) s.max_col_norm = std::max(s.max_col_norm, c);
            }
        }
        s.replacements = h.replacements.size();
        out.push_back(s);
    }
    return out;
}

std::string format_summary_table(const std::vector<RunSummary>& rows) {
    std::ostringstream o;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-32s %12s %12s %10s %6s %12s\n", "run", "final_true", "min_true",
                  "iters_tol", "repl", "max_col");
    o << buf;
    for (const RunSummary& s : rows) {
        const std::string it = s.iterations_to_tol ? std::to_string(*s.iterations_to_tol) : "-";
        std::snprintf(buf, sizeof buf, "%-32s %12s %12s %10s %6zu %12s\n", s.label.c_str(),
                      sci(s.final_true_residual).c_str(), sci(s.min_true_residual).c_str(), it.c_str(),
                      s.replacements, sci(s.max_col_norm).c_str());
        o << buf;
    }
    return o.str();
}

std::string list_problems() {
    std::ostringstream o;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-5s %-14s %10s %-8s %-8s %-6s\n", "id", "grid", "N", "stencil", "eps",
                  "precond");
    o << buf;
    for (ProblemId id : {ProblemId::TP1, ProblemId::TP2, ProblemId::TP3, ProblemId::TP4, ProblemId::TP5}) {
        const ProblemInfo& p = problem_info(id);
        const StencilSpec s = StencilSpec::defaults(id);
        std::string grid = std::to_string(p.nx) + "x" + std::to_string(p.ny);
        if (p.three_dimensional) grid += "x" + std::to_string(p.nz);
        char eps[32] = "-";
        if (p.epsilon) std::snprintf(eps, sizeof eps, "%g", *p.epsilon);
        std::snprintf(buf, sizeof buf, "%-5s %-14s %10lld %-8s %-8s %-6s\n",
                      std::string(problem_name(id)).c_str(), grid.c_str(),
                      static_cast<long long>(s.size()), std::string(p.stencil_type).c_str(), eps,
                      p.icc0_by_default ? "ICC(0)" : "none");
        o << buf;
    }
    return o.str();
}

}  // namespace krylov_gap::harness
