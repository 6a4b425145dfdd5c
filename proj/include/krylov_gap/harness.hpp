#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krylov_gap/solver_types.hpp"
#include "krylov_gap/stability.hpp"
#include "krylov_gap/stencil.hpp"

namespace krylov_gap::harness {

enum class PrecondKind { none, icc0 };

std::string_view precond_name(PrecondKind k);
PrecondKind parse_precond_kind(std::string_view s);

struct ExperimentConfig {
    StencilSpec problem = StencilSpec::defaults(ProblemId::TP1);
    /// Matrix Market file replacing the stencil problem when set.
    std::optional<std::filesystem::path> matrix_path;
    SolverKind solver = SolverKind::bicgstab_pipelined;
    PrecondKind preconditioner = PrecondKind::icc0;
    ReplacementPolicy policy;
    SolveOptions opts;
    std::filesystem::path output_dir;  // empty: no files written
    bool emit_plots = false;
    std::string seed_label;

    /// Reference grid and preconditioner of the problem, other fields default.
    static ExperimentConfig defaults(ProblemId id);

    /// Throws ConfigError. ICC(0) needs a problem with a symmetric pattern.
    void validate() const;
};

/// Overlays the keys of a JSON object onto base. Keys mirror the CLI flags:
/// problem, solver, precond, rr, tol, max_iters, nx, ny, nz, eps, normalize,
/// matrix, out, plots, seed_label, stopping_norm. Unknown keys are rejected.
ExperimentConfig apply_json_config(const ExperimentConfig& base, std::string_view json_text);
ExperimentConfig load_json_config(const ExperimentConfig& base, const std::filesystem::path& path);

/// Run metadata written to run.json.
struct RunInfo {
    std::string problem;  // "TP1".."TP5" or "custom"
    index_t n = 0;
    std::string solver;
    std::string preconditioner;
    std::string policy;
    double tol = 0.0;
    double b_norm = 0.0;
    std::string status;
    index_t iterations = 0;
    std::string breakdown_reason;
    index_t spmv = 0;
    index_t precond = 0;
    std::string seed_label;
};

/// One CSV row of history.csv.
struct HistoryRow {
    GapRecord record;
    ProductColumnNorms col_norms{};
};

struct ConvergenceHistory {
    RunInfo info;
    std::vector<HistoryRow> rows;
    CoefficientTrace trace;
    std::vector<index_t> replacements;
};

/// Builds the problem (b = A 1/sqrt(N), x0 = 0), solves with instrumentation
/// and writes history.csv, trace.csv, run.json and optionally the SVG panels
/// into cfg.output_dir. Breakdown is reported through info.status.
ConvergenceHistory run_experiment(const ExperimentConfig& cfg);

/// Runs independent experiments on worker threads, capped by KRYLOV_GAP_THREADS.
/// Results are in input order.
std::vector<ConvergenceHistory> run_experiments(const std::vector<ExperimentConfig>& cfgs);

/// Worker count: KRYLOV_GAP_THREADS if set and positive, else hardware concurrency.
unsigned worker_threads();

inline constexpr std::string_view kHistoryHeader =
    "iter,rec_resid,true_resid,gap_r,gap_s,gap_w,gap_z,gap_k,gap_l,bound_fr,col_norm_U,"
    "col_norm_OU,col_norm_BA,col_norm_UEA,col_norm_BAEA,col_norm_BPA,col_norm_UC,"
    "col_norm_BAC,col_norm_BD,replaced";

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows);
std::string history_csv(const std::vector<HistoryRow>& rows);
/// Throws ConfigError on a malformed file.
std::vector<HistoryRow> read_history_csv(std::istream& in);
std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path);

/// Columns alpha, beta, omega, bound_fk; row j holds the coefficients of iteration j.
void write_trace_csv(std::ostream& out, const ConvergenceHistory& h);

std::string run_info_json(const RunInfo& info, std::span<const index_t> replacements);
/// Reads the metadata and replacement list back.
RunInfo read_run_info(const std::filesystem::path& path, std::vector<index_t>* replacements = nullptr);

/// Loads history.csv and run.json from a run directory.
ConvergenceHistory load_run(const std::filesystem::path& dir);

/// Top: residual norms, gap and bound. Middle: auxiliary gaps. Bottom: product
/// column norms. All on log10 axes; a pure function of the rows.
void write_plots(const std::vector<HistoryRow>& rows, const std::filesystem::path& dir);

struct RunSummary {
    std::string label;
    std::string solver;
    std::string policy;
    double final_true_residual = 0.0;
    double min_true_residual = 0.0;
    std::optional<index_t> iterations_to_tol;
    std::size_t replacements = 0;
    double max_col_norm = 0.0;
};

/// Needs at least two histories of the same problem and size; throws ConfigError.
std::vector<RunSummary> compare_runs(const std::vector<ConvergenceHistory>& histories,
                                     const std::vector<std::string>& labels = {});
std::string format_summary_table(const std::vector<RunSummary>& rows);

/// Registry dump: N, stencil, epsilon and default preconditioner of TP1..TP5.
std::string list_problems();

}  // namespace krylov_gap::harness
