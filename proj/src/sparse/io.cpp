#include "krylov_gap/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>
#include <vector>

namespace krylov_gap::io {
namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    const auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

CsrMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("MatrixMarket: empty input");
    std::istringstream header(lower(line));
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
        throw ConfigError("MatrixMarket: only 'matrix coordinate' files are supported");
    }
    if (field != "real" && field != "integer") {
        throw ConfigError("MatrixMarket: field must be real or integer");
    }
    if (symmetry != "general" && symmetry != "symmetric") {
        throw ConfigError("MatrixMarket: symmetry must be general or symmetric");
    }
    const bool symmetric = symmetry == "symmetric";
    do {
        if (!std::getline(in, line)) throw ConfigError("MatrixMarket: missing size line");
    } while (line.empty() || line[0] == '%');
    index_t rows = 0, cols = 0, entries = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> entries)) throw ConfigError("MatrixMarket: bad size line");
    }
    std::vector<std::tuple<index_t, index_t, double>> trip;
    trip.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    for (index_t k = 0; k < entries; ++k) {
        if (!std::getline(in, line)) throw ConfigError("MatrixMarket: truncated entry list");
        if (line.empty() || line[0] == '%') {
            --k;
            continue;
        }
        std::istringstream es(line);
        index_t r = 0, c = 0;
        std::string vs;
        if (!(es >> r >> c >> vs)) throw ConfigError("MatrixMarket: bad entry line");
        const double v = parse_double(vs);
        if (r < 1 || r > rows || c < 1 || c > cols) throw ConfigError("MatrixMarket: index out of range");
        trip.emplace_back(r - 1, c - 1, v);
        if (symmetric && r != c) trip.emplace_back(c - 1, r - 1, v);
    }
    return CsrMatrix::from_triplets(rows, cols, std::move(trip));
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a, MatrixMarketSymmetry symmetry) {
    const bool sym = symmetry == MatrixMarketSymmetry::symmetric;
    if (sym && !is_symmetric(a)) {
        throw ConfigError("write_matrix_market: matrix is not symmetric");
    }
    index_t count = 0;
    for (index_t r = 0; r < a.n_rows(); ++r) {
        for (index_t c : a.row_cols(r)) {
            if (!sym || c <= r) ++count;
        }
    }
    out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << '\n';
    out << a.n_rows() << ' ' << a.n_cols() << ' ' << count << '\n';
    for (index_t r = 0; r < a.n_rows(); ++r) {
        const auto cols = a.row_cols(r);
        const auto vals = a.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (sym && cols[k] > r) continue;
            out << (r + 1) << ' ' << (cols[k] + 1) << ' ' << format_double(vals[k]) << '\n';
        }
    }
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a,
                         MatrixMarketSymmetry symmetry) {
    auto out = open_out(path);
    write_matrix_market(out, a, symmetry);
}

Vector read_vector(std::istream& in) {
    Vector v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        v.push_back(parse_double(line));
    }
    return v;
}

Vector read_vector(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> v) {
    for (double x : v) out << format_double(x) << '\n';
}

void write_vector(const std::filesystem::path& path, std::span<const double> v) {
    auto out = open_out(path);
    write_vector(out, v);
}

}  // namespace krylov_gap::io
