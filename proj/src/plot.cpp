#include "dqw/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dqw/io.hpp"

namespace dqw {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 8> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                                 "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

std::string tick_label(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", v);
    return buffer;
}

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Linear map from data ranges onto the plotting frame.
struct Frame {
    double x0, x1, y0, y1;

    double x(double v) const { return kLeft + (v - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double y(double v) const { return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame make_frame(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    return {x0, x1, y0, y1};
}

void open_svg(std::ostringstream& os, double width, double height) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
       << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& os, const Frame& f, std::string_view xlabel, std::string_view ylabel) {
    const double left = f.x(f.x0), right = f.x(f.x1), bottom = f.y(f.y0), top = f.y(f.y1);
    os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
       << "\" height=\"" << num(bottom - top) << "\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        os << "<line x1=\"" << num(f.x(xv)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(f.x(xv))
           << "\" y2=\"" << num(bottom + 5) << "\"/>\n";
        os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(f.y(yv)) << "\" x2=\"" << num(left)
           << "\" y2=\"" << num(f.y(yv)) << "\"/>\n";
    }
    os << "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
        os << "<text x=\"" << num(f.x(xv)) << "\" y=\"" << num(bottom + 18)
           << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
        os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(f.y(yv) + 4)
           << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
    }
    os << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(kHeight - 10)
       << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os << "<text x=\"14\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << num((top + bottom) / 2) << ")\">" << escape(ylabel) << "</text>\n</g>\n";
}

double rescale_factor(Rescale rescale, int grid_size) {
    const double n = static_cast<double>(grid_size) * grid_size;
    switch (rescale) {
        case Rescale::nodes: return n;
        case Rescale::log_nodes: return std::log(n);
        case Rescale::none: break;
    }
    return 1.0;
}

// Sequential blue scale from white (0) to dark blue (1).
std::string color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 - t * (255 - 8)));
    const int g = static_cast<int>(std::lround(255 - t * (255 - 48)));
    const int b = static_cast<int>(std::lround(255 - t * (255 - 107)));
    char buffer[8];
    std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
    return buffer;
}

}  // namespace

PlotKind parse_plot_kind(std::string_view text) {
    if (text == "series") return PlotKind::series;
    if (text == "rescaled_series") return PlotKind::rescaled_series;
    if (text == "scaling") return PlotKind::scaling;
    if (text == "heatmap") return PlotKind::heatmap;
    throw ConfigError("unknown plot kind '" + std::string(text) +
                      "' (expected series, rescaled_series, scaling or heatmap)");
}

Rescale parse_rescale(std::string_view text) {
    if (text == "none") return Rescale::none;
    if (text == "N") return Rescale::nodes;
    if (text == "logN") return Rescale::log_nodes;
    throw ConfigError("unknown rescale '" + std::string(text) + "' (expected none, N or logN)");
}

std::string series_svg(const std::vector<Curve>& curves, Rescale rescale) {
    if (curves.empty()) throw ConfigError("series plot needs at least one curve");
    double x_max = 1.0, y_max = 0.0;
    for (const auto& c : curves) {
        x_max = std::max(x_max, static_cast<double>(c.values.size()) - 1);
        const double k = rescale_factor(rescale, c.grid_size);
        for (double v : c.values) y_max = std::max(y_max, v * k);
    }
    const Frame f = make_frame(0.0, x_max, 0.0, y_max * 1.05);

    const char* ylabel = rescale == Rescale::nodes ? "P_j x N" : rescale == Rescale::log_nodes ? "P_j x ln N" : "P_j";
    std::ostringstream os;
    open_svg(os, kWidth, kHeight);
    axes(os, f, "j", ylabel);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const double k = rescale_factor(rescale, c.grid_size);
        os << "<polyline class=\"curve\" fill=\"none\" stroke-width=\"1.5\" stroke=\""
           << kPalette[i % kPalette.size()] << "\" points=\"";
        for (std::size_t j = 0; j < c.values.size(); ++j)
            os << (j ? " " : "") << num(f.x(static_cast<double>(j))) << ',' << num(f.y(c.values[j] * k));
        os << "\"/>\n";
        os << "<text class=\"legend\" font-family=\"sans-serif\" font-size=\"11\" x=\"" << num(kWidth - kRight - 150)
           << "\" y=\"" << num(kTop + 14 + 14 * static_cast<double>(i)) << "\" fill=\""
           << kPalette[i % kPalette.size()] << "\">" << escape(c.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string scaling_svg(const std::vector<ScalingPoint>& points, const std::optional<ScalingFit>& fit) {
    if (points.empty()) throw ConfigError("scaling plot needs at least one point");
    double x_max = 0.0, y_max = 0.0;
    for (const auto& p : points) {
        x_max = std::max(x_max, static_cast<double>(p.grid_size));
        if (p.first) y_max = std::max(y_max, static_cast<double>(*p.first));
        if (p.second) y_max = std::max(y_max, static_cast<double>(*p.second));
    }
    const Frame f = make_frame(0.0, x_max * 1.1, 0.0, y_max * 1.1);
    std::ostringstream os;
    open_svg(os, kWidth, kHeight);
    axes(os, f, "sqrt(N)", "j");
    for (const auto& p : points) {
        if (p.first)
            os << "<circle class=\"j1\" cx=\"" << num(f.x(p.grid_size)) << "\" cy=\"" << num(f.y(*p.first))
               << "\" r=\"4\" fill=\"#1b9e77\"/>\n";
    }
    for (const auto& p : points) {
        if (p.second)
            os << "<rect class=\"j2\" x=\"" << num(f.x(p.grid_size) - 4) << "\" y=\"" << num(f.y(*p.second) - 4)
               << "\" width=\"8\" height=\"8\" fill=\"#2c7fb8\"/>\n";
    }
    if (fit) {
        const double a = fit->points.empty() ? 0.0 : fit->points.front().first;
        double lo = a, hi = a;
        for (const auto& [x, y] : fit->points) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        os << "<line class=\"fit\" stroke=\"#2c7fb8\" stroke-dasharray=\"5,3\" x1=\"" << num(f.x(lo)) << "\" y1=\""
           << num(f.y(fit->slope * lo + fit->intercept)) << "\" x2=\"" << num(f.x(hi)) << "\" y2=\""
           << num(f.y(fit->slope * hi + fit->intercept)) << "\"/>\n";
        os << "<text font-family=\"sans-serif\" font-size=\"11\" x=\"" << num(kLeft + 10) << "\" y=\"" << num(kTop + 14)
           << "\">j2 = " << tick_label(fit->slope) << " sqrt(N) + " << tick_label(fit->intercept)
           << ", r2 = " << tick_label(fit->r_squared) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const std::vector<DistributionSnapshot>& snapshots) {
    if (snapshots.empty()) throw ConfigError("heatmap needs at least one snapshot");
    const int m = snapshots.front().grid_size;
    for (const auto& s : snapshots)
        if (s.grid_size != m) throw ConfigError("heatmap panels must share one grid size");

    constexpr int kMaxCells = 200;
    const int block = (m + kMaxCells - 1) / kMaxCells;
    const int cells = (m + block - 1) / block;
    const double cell_px = std::max(1.0, 300.0 / cells);
    const double panel = cells * cell_px;
    const double gap = 20.0;

    std::vector<std::vector<double>> coarse;
    double peak = 0.0;
    for (const auto& s : snapshots) {
        std::vector<double> grid(static_cast<std::size_t>(cells) * cells, 0.0);
        for (int bp = 0; bp < cells; ++bp)
            for (int bq = 0; bq < cells; ++bq) {
                double sum = 0.0;
                int count = 0;
                for (int p = bp * block; p < std::min(m, (bp + 1) * block); ++p)
                    for (int q = bq * block; q < std::min(m, (bq + 1) * block); ++q) {
                        sum += s.at(p, q);
                        ++count;
                    }
                grid[static_cast<std::size_t>(bp) * cells + bq] = sum / count;
            }
        peak = std::max(peak, *std::max_element(grid.begin(), grid.end()));
        coarse.push_back(std::move(grid));
    }
    if (!(peak > 0.0)) peak = 1.0;

    const double width = gap + snapshots.size() * (panel + gap);
    const double height = panel + 2 * gap + 20;
    std::ostringstream os;
    open_svg(os, width, height);
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        const double x0 = gap + k * (panel + gap);
        const double y0 = gap + 20;
        os << "<text font-family=\"sans-serif\" font-size=\"12\" x=\"" << num(x0) << "\" y=\"" << num(gap + 10)
           << "\">M = " << m << ", j = " << snapshots[k].step << "</text>\n";
        os << "<g class=\"panel\" shape-rendering=\"crispEdges\">\n";
        // p runs along x, q upwards
        for (int bp = 0; bp < cells; ++bp)
            for (int bq = 0; bq < cells; ++bq) {
                const double v = coarse[k][static_cast<std::size_t>(bp) * cells + bq] / peak;
                os << "<rect x=\"" << num(x0 + bp * cell_px) << "\" y=\"" << num(y0 + (cells - 1 - bq) * cell_px)
                   << "\" width=\"" << num(cell_px) << "\" height=\"" << num(cell_px) << "\" fill=\"" << color(v)
                   << "\"/>\n";
            }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_plot(PlotKind kind, const PlotInputs& inputs, Rescale rescale, const std::filesystem::path& path) {
    std::string svg;
    switch (kind) {
        case PlotKind::series: svg = series_svg(inputs.curves, rescale); break;
        case PlotKind::rescaled_series:
            svg = series_svg(inputs.curves, rescale == Rescale::none ? Rescale::nodes : rescale);
            break;
        case PlotKind::scaling: svg = scaling_svg(inputs.scaling, inputs.fit); break;
        case PlotKind::heatmap: svg = heatmap_svg(inputs.snapshots); break;
    }
    write_text(path, svg);
}

std::vector<ScalingPoint> scaling_points(const ScanResult& scan) {
    std::vector<ScalingPoint> points;
    for (const auto& e : scan.entries) {
        ScalingPoint p{e.grid_size, {}, {}};
        if (e.peaks.first) p.first = e.peaks.first->step;
        if (e.peaks.second) p.second = e.peaks.second->step;
        points.push_back(p);
    }
    return points;
}

}  // namespace dqw
