#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqw/experiments.hpp"
#include "dqw/observables.hpp"

namespace dqw {

enum class PlotKind { series, rescaled_series, scaling, heatmap };
enum class Rescale { none, nodes, log_nodes };  // x1, x N, x ln N

PlotKind parse_plot_kind(std::string_view text);
Rescale parse_rescale(std::string_view text);

struct Curve {
    std::string label;
    int grid_size = 0;
    std::vector<double> values;  // P_j, j = 0..
};

struct ScalingPoint {
    int grid_size = 0;
    std::optional<int> first;
    std::optional<int> second;
};

struct PlotInputs {
    std::vector<Curve> curves;
    std::vector<ScalingPoint> scaling;
    std::optional<ScalingFit> fit;
    std::vector<DistributionSnapshot> snapshots;
};

// P_j (optionally multiplied by N or ln N) against j, one polyline per curve.
std::string series_svg(const std::vector<Curve>& curves, Rescale rescale);

// j1 as circles, j2 as squares against sqrt N, plus the fitted line for j2.
std::string scaling_svg(const std::vector<ScalingPoint>& points, const std::optional<ScalingFit>& fit);

// Side-by-side panels with a shared linear color scale normalized to the
// largest cell over all panels. Grids wider than 200 cells are block-averaged.
std::string heatmap_svg(const std::vector<DistributionSnapshot>& snapshots);

// Dispatches on kind and writes the SVG. Byte-identical for identical inputs.
void emit_plot(PlotKind kind, const PlotInputs& inputs, Rescale rescale,
               const std::filesystem::path& path);

std::vector<ScalingPoint> scaling_points(const ScanResult& scan);

}  // namespace dqw
