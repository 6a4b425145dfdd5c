#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "krylov_gap/harness.hpp"
#include "krylov_gap/io.hpp"
#include "krylov_gap/precond.hpp"
#include "krylov_gap/solvers.hpp"

namespace krylov_gap::harness {
namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

template <class T>
T get_as(const json& v, const char* key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

index_t get_count(const json& v, const char* key) {
    if (!v.is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must be an integer");
    return v.get<index_t>();
}

StoppingNorm parse_stopping_norm(std::string_view s) {
    const std::string v = lower(s);
    if (v == "recursive") return StoppingNorm::recursive;
    if (v == "true" || v == "true_residual") return StoppingNorm::true_residual;
    throw ConfigError("unknown stopping norm: " + std::string(s));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

std::string_view precond_name(PrecondKind k) {
    return k == PrecondKind::icc0 ? "icc0" : "none";
}

PrecondKind parse_precond_kind(std::string_view s) {
    const std::string v = lower(s);
    if (v == "none" || v == "identity") return PrecondKind::none;
    if (v == "icc0" || v == "icc" || v == "ichol") return PrecondKind::icc0;
    throw ConfigError("unknown preconditioner: " + std::string(s));
}

ExperimentConfig ExperimentConfig::defaults(ProblemId id) {
    ExperimentConfig c;
    c.problem = StencilSpec::defaults(id);
    c.preconditioner = problem_info(id).icc0_by_default ? PrecondKind::icc0 : PrecondKind::none;
    return c;
}

void ExperimentConfig::validate() const {
    opts.validate();
    policy.validate();
    if (!matrix_path) {
        const ProblemInfo& info = problem_info(problem.problem_id);
        if (problem.nx < 2 || problem.ny < 2 || (info.three_dimensional && problem.nz < 2)) {
            throw ConfigError("grid counts must be >= 2");
        }
        if (info.epsilon && !(problem.epsilon > 0.0 && problem.epsilon < 1.0)) {
            throw ConfigError("eps must lie in (0, 1)");
        }
    }
    if (emit_plots && output_dir.empty()) throw ConfigError("plots need an output directory");
}

ExperimentConfig apply_json_config(const ExperimentConfig& base, std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c = base;
    // The problem key resets the grid, so it is applied before the grid keys.
    if (auto it = j.find("problem"); it != j.end()) {
        const ProblemId id = parse_problem_id(get_as<std::string>(*it, "problem"));
        c.problem = StencilSpec::defaults(id);
        c.preconditioner = problem_info(id).icc0_by_default ? PrecondKind::icc0 : PrecondKind::none;
    }
    for (const auto& [key, v] : j.items()) {
        const char* k = key.c_str();
        if (key == "problem") continue;
        if (key == "solver") c.solver = parse_solver_kind(get_as<std::string>(v, k));
        else if (key == "precond") c.preconditioner = parse_precond_kind(get_as<std::string>(v, k));
        else if (key == "rr") c.policy = parse_replacement_policy(get_as<std::string>(v, k));
        else if (key == "tol") c.opts.tol = get_as<double>(v, k);
        else if (key == "max_iters") c.opts.max_iters = get_count(v, k);
        else if (key == "nx") c.problem.nx = get_count(v, k);
        else if (key == "ny") c.problem.ny = get_count(v, k);
        else if (key == "nz") c.problem.nz = get_count(v, k);
        else if (key == "eps") c.problem.epsilon = get_as<double>(v, k);
        else if (key == "normalize") c.problem.normalize = get_as<bool>(v, k);
        else if (key == "matrix") c.matrix_path = get_as<std::string>(v, k);
        else if (key == "out") c.output_dir = get_as<std::string>(v, k);
        else if (key == "plots") c.emit_plots = get_as<bool>(v, k);
        else if (key == "seed_label") c.seed_label = get_as<std::string>(v, k);
        else if (key == "stopping_norm") c.opts.stopping_norm = parse_stopping_norm(get_as<std::string>(v, k));
        else throw ConfigError("unknown config key: " + key);
    }
    return c;
}

ExperimentConfig load_json_config(const ExperimentConfig& base, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return apply_json_config(base, ss.str());
}

ConvergenceHistory run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    CsrMatrix a = cfg.matrix_path ? io::read_matrix_market(*cfg.matrix_path) : stencil_matrix(cfg.problem);
    if (!a.square()) throw ConfigError("matrix must be square");
    const Vector b = manufactured_rhs(a);
    const Vector x0(b.size(), 0.0);
    if (cfg.preconditioner == PrecondKind::icc0 && !has_symmetric_pattern(a)) {
        throw ConfigError("icc0 needs a matrix with a symmetric pattern");
    }
    const Preconditioner m = cfg.preconditioner == PrecondKind::icc0 ? Preconditioner::icc0(a)
                                                                     : Preconditioner::identity(a.n_rows());
    SolveResult res = solve(cfg.solver, a, m, b, x0, cfg.opts, cfg.policy);

    ConvergenceHistory h;
    RunInfo& info = h.info;
    info.problem = cfg.matrix_path ? "custom" : std::string(problem_name(cfg.problem.problem_id));
    info.n = a.n_rows();
    info.solver = solver_name(cfg.solver);
    info.preconditioner = precond_name(cfg.preconditioner);
    info.policy = format_replacement_policy(cfg.policy);
    info.tol = cfg.opts.tol;
    info.b_norm = res.b_norm;
    info.status = status_name(res.status);
    info.iterations = res.iterations;
    info.breakdown_reason = res.breakdown_reason;
    info.spmv = res.ops.spmv;
    info.precond = res.ops.precond;
    info.seed_label = cfg.seed_label;

    const std::vector<ProductColumnNorms> cols = product_column_norm_history(res.trace, res.replacements);
    h.rows.reserve(res.history.size());
    for (std::size_t i = 0; i < res.history.size(); ++i) {
        HistoryRow row;
        row.record = res.history[i];
        if (i < cols.size()) {
            row.col_norms = cols[i];
        } else {
            row.col_norms.fill(kNaN);
        }
        h.rows.push_back(row);
    }
    h.trace = std::move(res.trace);
    h.replacements = std::move(res.replacements);

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        write_file(cfg.output_dir / "history.csv", history_csv(h.rows));
        std::ostringstream trace;
        write_trace_csv(trace, h);
        write_file(cfg.output_dir / "trace.csv", trace.str());
        write_file(cfg.output_dir / "run.json", run_info_json(h.info, h.replacements));
        if (cfg.emit_plots) write_plots(h.rows, cfg.output_dir);
    }
    return h;
}

unsigned worker_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KRYLOV_GAP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    return n;
}

std::vector<ConvergenceHistory> run_experiments(const std::vector<ExperimentConfig>& cfgs) {
    std::vector<ConvergenceHistory> out(cfgs.size());
    std::vector<std::exception_ptr> errors(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
            try {
                out[i] = run_experiment(cfgs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max<std::size_t>(1, cfgs.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace krylov_gap::harness
