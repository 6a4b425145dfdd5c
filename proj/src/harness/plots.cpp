#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "krylov_gap/harness.hpp"

namespace krylov_gap::harness {
namespace {

struct Series {
    std::string name;
    std::string color;
    bool dashed = false;
    std::vector<double> y;
};

constexpr double kWidth = 760;
constexpr double kHeight = 440;
constexpr double kLeft = 70;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

bool plottable(double v) { return std::isfinite(v) && v > 0.0; }

/// Line plot with a log10 vertical axis. Non-positive and non-finite samples
/// break the polyline.
std::string svg_panel(const std::string& title, const std::vector<double>& x,
                      const std::vector<Series>& series, const std::vector<double>& markers) {
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    for (const Series& s : series) {
        for (double v : s.y) {
            if (!plottable(v)) continue;
            lo = std::min(lo, std::log10(v));
            hi = std::max(hi, std::log10(v));
        }
    }
    if (lo > hi) {
        lo = -1;
        hi = 1;
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1;
    const double x_max = x.empty() ? 1.0 : std::max(1.0, x.back());
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + pw * v / x_max; };
    auto py = [&](double v) { return kTop + ph * (hi - std::log10(v)) / (hi - lo); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(kLeft) << "\" y=\"22\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const int decades = static_cast<int>(hi - lo);
    const int step = std::max(1, decades / 10);
    for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step) {
        const double y = py(std::pow(10.0, e));
        o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw)
          << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e"
          << e << "</text>\n";
    }
    for (int t = 0; t <= 5; ++t) {
        const double v = x_max * t / 5.0;
        o << "<text x=\"" << num(px(v)) << "\" y=\"" << num(kTop + ph + 16)
          << "\" text-anchor=\"middle\">" << std::llround(v) << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">iteration</text>\n";
    for (double m : markers) {
        o << "<line x1=\"" << num(px(m)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(m))
          << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#999\" stroke-dasharray=\"2,3\"/>\n";
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series& s = series[k];
        std::string pts;
        auto flush = [&] {
            if (!pts.empty()) {
                o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\""
                  << (s.dashed ? " stroke-dasharray=\"4,3\"" : "") << " points=\"" << pts << "\"/>\n";
                pts.clear();
            }
        };
        for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i) {
            if (!plottable(s.y[i])) {
                flush();
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += num(px(x[i])) + "," + num(py(s.y[i]));
        }
        flush();
        const double ly = kTop + 12 + 16.0 * static_cast<double>(k);
        const double lx = kLeft + pw + 12;
        o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
        o << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\">" << s.name << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

}  // namespace

void write_plots(const std::vector<HistoryRow>& rows, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<double> x;
    std::vector<double> markers;
    for (const HistoryRow& r : rows) {
        x.push_back(static_cast<double>(r.record.i));
        if (r.record.replaced) markers.push_back(static_cast<double>(r.record.i));
    }
    auto column = [&](auto get) {
        std::vector<double> v;
        v.reserve(rows.size());
        for (const HistoryRow& r : rows) v.push_back(get(r));
        return v;
    };

    std::vector<Series> top = {
        {"recursive ||r||", kPalette[0], false, column([](const HistoryRow& r) { return r.record.recursive_residual_norm; })},
        {"true ||b-Ax||", kPalette[1], false, column([](const HistoryRow& r) { return r.record.true_residual_norm; })},
        {"gap r", kPalette[2], true, column([](const HistoryRow& r) { return r.record.gap_r; })},
        {"bound f_r", kPalette[3], true, column([](const HistoryRow& r) { return r.record.bound_f_r; })},
    };
    write_text(dir / "residuals.svg", svg_panel("Residual norms and residual gap", x, top, markers));

    std::vector<Series> middle = {
        {"gap s", kPalette[0], false, column([](const HistoryRow& r) { return r.record.gap_s; })},
        {"gap w", kPalette[1], false, column([](const HistoryRow& r) { return r.record.gap_w; })},
        {"gap z", kPalette[2], false, column([](const HistoryRow& r) { return r.record.gap_z; })},
        {"gap k", kPalette[3], false, column([](const HistoryRow& r) { return r.record.gap_k; })},
        {"gap l", kPalette[4], false, column([](const HistoryRow& r) { return r.record.gap_l; })},
    };
    write_text(dir / "gaps.svg", svg_panel("Auxiliary variable gaps", x, middle, markers));

    std::vector<Series> bottom;
    for (std::size_t p = 0; p < kProductCount; ++p) {
        bottom.push_back({std::string(product_name(kAllProducts[p])), kPalette[p], false,
                          column([p](const HistoryRow& r) { return r.col_norms[p]; })});
    }
    write_text(dir / "column_norms.svg",
               svg_panel("Max norm of column i of the propagation products", x, bottom, markers));
}

}  // namespace krylov_gap::harness
