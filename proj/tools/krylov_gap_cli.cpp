#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krylov_gap/harness.hpp"

namespace kg = krylov_gap;
namespace h = krylov_gap::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBreakdown = 2;
constexpr int kExitConfig = 3;

struct RunFlags {
    std::optional<std::string> config;
    std::optional<std::string> problem;
    std::optional<std::string> solver;
    std::optional<std::string> precond;
    std::optional<std::string> rr;
    std::optional<double> tol;
    std::optional<kg::index_t> max_iters;
    std::optional<kg::index_t> nx, ny, nz;
    std::optional<double> eps;
    std::optional<std::string> matrix;
    std::optional<std::string> out;
    std::optional<std::string> stopping_norm;
    std::optional<std::string> seed_label;
    bool plots = false;
    bool no_normalize = false;
};

h::ExperimentConfig build_config(const RunFlags& f) {
    h::ExperimentConfig c = h::ExperimentConfig::defaults(kg::ProblemId::TP1);
    if (f.config) c = h::load_json_config(c, *f.config);
    if (f.problem) {
        // Flags override the file, so the problem resets grid and preconditioner first.
        const auto id = kg::parse_problem_id(*f.problem);
        const auto d = h::ExperimentConfig::defaults(id);
        c.problem = d.problem;
        c.preconditioner = d.preconditioner;
    }
    if (f.solver) c.solver = kg::parse_solver_kind(*f.solver);
    if (f.precond) c.preconditioner = h::parse_precond_kind(*f.precond);
    if (f.rr) c.policy = kg::parse_replacement_policy(*f.rr);
    if (f.tol) c.opts.tol = *f.tol;
    if (f.max_iters) c.opts.max_iters = *f.max_iters;
    if (f.nx) c.problem.nx = *f.nx;
    if (f.ny) c.problem.ny = *f.ny;
    if (f.nz) c.problem.nz = *f.nz;
    if (f.eps) c.problem.epsilon = *f.eps;
    if (f.no_normalize) c.problem.normalize = false;
    if (f.matrix) c.matrix_path = *f.matrix;
    if (f.out) c.output_dir = *f.out;
    if (f.plots) c.emit_plots = true;
    if (f.seed_label) c.seed_label = *f.seed_label;
    if (f.stopping_norm) {
        if (*f.stopping_norm == "recursive") {
            c.opts.stopping_norm = kg::StoppingNorm::recursive;
        } else if (*f.stopping_norm == "true") {
            c.opts.stopping_norm = kg::StoppingNorm::true_residual;
        } else {
            throw kg::ConfigError("--stopping-norm must be recursive or true");
        }
    }
    return c;
}

int cmd_run(const RunFlags& f) {
    const h::ExperimentConfig cfg = build_config(f);
    const h::ConvergenceHistory hist = h::run_experiment(cfg);
    double min_true = HUGE_VAL;
    for (const auto& r : hist.rows) min_true = std::min(min_true, r.record.true_residual_norm);
    std::printf("problem %s N=%lld solver %s precond %s rr %s\n", hist.info.problem.c_str(),
                static_cast<long long>(hist.info.n), hist.info.solver.c_str(),
                hist.info.preconditioner.c_str(), hist.info.policy.c_str());
    std::printf("status %s after %lld iterations (%lld spmv, %lld precond)\n", hist.info.status.c_str(),
                static_cast<long long>(hist.info.iterations), static_cast<long long>(hist.info.spmv),
                static_cast<long long>(hist.info.precond));
    if (!hist.info.breakdown_reason.empty()) std::printf("breakdown: %s\n", hist.info.breakdown_reason.c_str());
    std::printf("final true residual %.6e, minimum %.6e, replacements %zu\n",
                hist.rows.back().record.true_residual_norm, min_true, hist.replacements.size());
    if (!cfg.output_dir.empty()) std::printf("wrote %s\n", cfg.output_dir.string().c_str());
    return hist.info.status == "breakdown" ? kExitBreakdown : kExitOk;
}

int cmd_compare(const std::vector<std::string>& dirs) {
    std::vector<h::ConvergenceHistory> runs;
    std::vector<std::string> labels;
    for (const auto& d : dirs) {
        runs.push_back(h::load_run(d));
        labels.push_back(d);
    }
    std::cout << h::format_summary_table(h::compare_runs(runs, labels));
    return kExitOk;
}

int cmd_plot(const std::string& dir) {
    h::write_plots(h::read_history_csv(std::filesystem::path(dir) / "history.csv"), dir);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classic and pipelined BiCGStab/CG with rounding-error instrumentation"};
    app.require_subcommand(1);

    RunFlags f;
    auto* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("--config", f.config, "JSON config; flags override its keys");
    run->add_option("--problem", f.problem, "TP1..TP5");
    run->add_option("--solver", f.solver, "cg, pcg, bicgstab, pbicgstab");
    run->add_option("--precond", f.precond, "none or icc0");
    run->add_option("--rr", f.rr, "none, auto or periodic:<P>");
    run->add_option("--tol", f.tol, "relative tolerance on the residual norm");
    run->add_option("--max-iters", f.max_iters, "iteration cap");
    run->add_option("--nx", f.nx, "grid points in x");
    run->add_option("--ny", f.ny, "grid points in y");
    run->add_option("--nz", f.nz, "grid points in z (3D problems)");
    run->add_option("--eps", f.eps, "stencil parameter for TP2, TP3, TP5");
    run->add_flag("--no-normalize", f.no_normalize, "keep the unscaled stencil");
    run->add_option("--matrix", f.matrix, "Matrix Market file used instead of a test problem");
    run->add_option("--stopping-norm", f.stopping_norm, "recursive or true");
    run->add_option("--seed-label", f.seed_label, "free-form label stored in run.json");
    run->add_option("--out", f.out, "output directory");
    run->add_flag("--plots", f.plots, "write SVG panels next to history.csv");

    auto* list = app.add_subcommand("list-problems", "Print the test problem registry");

    std::vector<std::string> dirs;
    auto* compare = app.add_subcommand("compare", "Summarize run directories on the same problem");
    compare->add_option("dirs", dirs, "run directories")->required()->expected(2, -1);

    std::string plot_dir;
    auto* plot = app.add_subcommand("plot", "Regenerate the SVG panels of a run directory");
    plot->add_option("dir", plot_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(f);
        if (*list) {
            std::cout << h::list_problems();
            return kExitOk;
        }
        if (*compare) return cmd_compare(dirs);
        if (*plot) return cmd_plot(plot_dir);
    } catch (const kg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const kg::DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
