#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "krylov_gap/harness.hpp"
#include "krylov_gap/io.hpp"

namespace krylov_gap::harness {
namespace {

using io::format_double;
constexpr std::size_t kColumns = 20;

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

index_t parse_index(std::string_view s, std::size_t line_no) {
    index_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("history.csv line " + std::to_string(line_no) + ": bad integer '" +
                          std::string(s) + "'");
    }
    return v;
}

double field(std::string_view s, std::size_t line_no) {
    try {
        return io::parse_double(s);
    } catch (const ConfigError&) {
        throw ConfigError("history.csv line " + std::to_string(line_no) + ": bad number '" +
                          std::string(s) + "'");
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& rows) {
    out << kHistoryHeader << '\n';
    for (const HistoryRow& row : rows) {
        const GapRecord& g = row.record;
        out << g.i;
        for (double v : {g.recursive_residual_norm, g.true_residual_norm, g.gap_r, g.gap_s, g.gap_w,
                         g.gap_z, g.gap_k, g.gap_l, g.bound_f_r}) {
            out << ',' << format_double(v);
        }
        for (double v : row.col_norms) out << ',' << format_double(v);
        out << ',' << (g.replaced ? 1 : 0) << '\n';
    }
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
    std::ostringstream out;
    write_history_csv(out, rows);
    return out.str();
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kHistoryHeader) {
        throw ConfigError("history.csv: missing or unexpected header");
    }
    std::vector<HistoryRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split(line);
        if (f.size() != kColumns) {
            throw ConfigError("history.csv line " + std::to_string(line_no) + ": expected " +
                              std::to_string(kColumns) + " fields");
        }
        HistoryRow row;
        GapRecord& g = row.record;
        g.i = parse_index(f[0], line_no);
        double* scalars[] = {&g.recursive_residual_norm, &g.true_residual_norm, &g.gap_r, &g.gap_s,
                             &g.gap_w, &g.gap_z, &g.gap_k, &g.gap_l, &g.bound_f_r};
        for (std::size_t c = 0; c < 9; ++c) *scalars[c] = field(f[1 + c], line_no);
        for (std::size_t c = 0; c < kProductCount; ++c) row.col_norms[c] = field(f[10 + c], line_no);
        if (f[19] != "0" && f[19] != "1") {
            throw ConfigError("history.csv line " + std::to_string(line_no) + ": replaced must be 0 or 1");
        }
        g.replaced = f[19] == "1";
        if (!rows.empty() && g.i <= rows.back().record.i) {
            throw ConfigError("history.csv line " + std::to_string(line_no) + ": iterations must increase");
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    return read_history_csv(in);
}

void write_trace_csv(std::ostream& out, const ConvergenceHistory& h) {
    out << "iter,alpha,beta,omega,bound_fk\n";
    for (std::size_t j = 0; j < h.rows.size(); ++j) {
        const bool has = j < static_cast<std::size_t>(h.trace.size());
        out << h.rows[j].record.i << ',' << format_double(has ? h.trace.alphas[j] : kNaN) << ','
            << format_double(has ? h.trace.betas[j] : kNaN) << ','
            << format_double(has ? h.trace.omegas[j] : kNaN) << ','
            << format_double(h.rows[j].record.bound_f_k) << '\n';
    }
}

std::string run_info_json(const RunInfo& info, std::span<const index_t> replacements) {
    nlohmann::ordered_json j;
    j["problem"] = info.problem;
    j["n"] = info.n;
    j["solver"] = info.solver;
    j["precond"] = info.preconditioner;
    j["rr"] = info.policy;
    j["tol"] = format_double(info.tol);
    j["b_norm"] = format_double(info.b_norm);
    j["status"] = info.status;
    j["iterations"] = info.iterations;
    j["breakdown_reason"] = info.breakdown_reason;
    j["spmv"] = info.spmv;
    j["precond_applications"] = info.precond;
    j["seed_label"] = info.seed_label;
    j["replacements"] = std::vector<index_t>(replacements.begin(), replacements.end());
    return j.dump(2) + "\n";
}

RunInfo read_run_info(const std::filesystem::path& path, std::vector<index_t>* replacements) {
    RunInfo info;
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        info.problem = j.at("problem").get<std::string>();
        info.n = j.at("n").get<index_t>();
        info.solver = j.at("solver").get<std::string>();
        info.preconditioner = j.at("precond").get<std::string>();
        info.policy = j.at("rr").get<std::string>();
        info.tol = io::parse_double(j.at("tol").get<std::string>());
        info.b_norm = io::parse_double(j.at("b_norm").get<std::string>());
        info.status = j.at("status").get<std::string>();
        info.iterations = j.at("iterations").get<index_t>();
        info.breakdown_reason = j.at("breakdown_reason").get<std::string>();
        info.spmv = j.at("spmv").get<index_t>();
        info.precond = j.at("precond_applications").get<index_t>();
        info.seed_label = j.at("seed_label").get<std::string>();
        if (replacements) *replacements = j.at("replacements").get<std::vector<index_t>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return info;
}

ConvergenceHistory load_run(const std::filesystem::path& dir) {
    ConvergenceHistory h;
    h.info = read_run_info(dir / "run.json", &h.replacements);
    h.rows = read_history_csv(dir / "history.csv");
    return h;
}

}  // namespace krylov_gap::harness
