#include <doctest.h>

#include <cmath>
#include <regex>

#include "dqw/plot.hpp"

using namespace dqw;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("scaling plot markers") {
    std::vector<ScalingPoint> points;
    std::vector<std::pair<double, double>> xy;
    for (int m : {100, 200, 300, 400, 500}) {
        points.push_back({m, 82, 2 * m});
        xy.emplace_back(m, 2 * m);
    }
    const auto svg = scaling_svg(points, fit_linear(xy));
    CHECK(count(svg, "class=\"j1\"") == 5);
    CHECK(count(svg, "class=\"j2\"") == 5);
    CHECK(count(svg, "class=\"fit\"") == 1);
    CHECK(scaling_svg(points, fit_linear(xy)) == svg);
    CHECK(count(scaling_svg(points, std::nullopt), "class=\"fit\"") == 0);
}

TEST_CASE("series plot is deterministic") {
    std::vector<Curve> curves{{"M=20", 20, {0.01, 0.02, 0.015}}, {"M=40", 40, {0.0025, 0.004, 0.003}}};
    const auto a = series_svg(curves, Rescale::nodes);
    CHECK(a == series_svg(curves, Rescale::nodes));
    CHECK(count(a, "<polyline") == 2);
    CHECK(a != series_svg(curves, Rescale::none));
}

TEST_CASE("heatmap") {
    DistributionSnapshot a{10, 1, std::vector<double>(100, 0.01)};
    DistributionSnapshot b{12, 1, std::vector<double>(144, 1.0 / 144)};
    CHECK_THROWS(heatmap_svg({a, b}));
    const auto svg = heatmap_svg({a, a});
    CHECK(count(svg, "<rect") >= 200);

    DistributionSnapshot big{400, 0, std::vector<double>(160000, 1.0 / 160000)};
    CHECK(count(heatmap_svg({big}), "<rect") <= 200 * 200 + 10);
}

TEST_CASE("plot kind parsing") {
    CHECK(parse_plot_kind("scaling") == PlotKind::scaling);
    CHECK(parse_rescale("logN") == Rescale::log_nodes);
    CHECK(parse_rescale("N") == Rescale::nodes);
    CHECK_THROWS(parse_plot_kind("bars"));
}
