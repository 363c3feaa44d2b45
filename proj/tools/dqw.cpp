// dqw: command-line front end for the electric Dirac walk search experiments.
//
//   dqw run      --config run.cfg            single realization, P_j series
//   dqw ensemble --config run.cfg            noise-averaged P_j series
//   dqw snapshot --config run.cfg            averaged d_j grids at j1/j2 (two passes)
//   dqw scan     --config run.cfg --grid-sizes 100,200,300
//   dqw plot     --kind series --rescale N a.csv b.csv
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqw/experiments.hpp"
#include "dqw/io.hpp"
#include "dqw/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
};

int resolve_threads(const GlobalOptions& g) {
    if (g.threads) {
        if (*g.threads < 1) throw dqw::ConfigError("--threads must be at least 1");
        return *g.threads;
    }
    if (const char* env = std::getenv("DQW_THREADS"); env && *env) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        throw dqw::ConfigError("DQW_THREADS must be a positive integer");
    }
    return dqw::default_thread_count();
}

dqw::ExperimentPlan load_plan(const GlobalOptions& g) {
    if (g.config_path.empty()) throw dqw::ConfigError("--config is required");
    dqw::ExperimentPlan plan = dqw::load_config(g.config_path);
    if (g.seed) plan.noise.master_seed = *g.seed;
    if (!g.out_dir.empty()) plan.output_dir = g.out_dir;
    plan.threads = resolve_threads(g);
    return plan;
}

int horizon(const dqw::ExperimentPlan& plan) { return plan.horizon_for(plan.lattice.grid_size); }

void write_series_with_meta(const dqw::TimeSeries& series, const fs::path& path, std::string_view command,
                            const dqw::ExperimentPlan& plan, const dqw::PeakRecord& peaks, json extra = json::object()) {
    dqw::write_series(series, path);
    extra["grid_size"] = series.grid_size();
    extra["steps"] = series.last_step();
    extra["peaks"] = dqw::peaks_to_json(peaks);
    dqw::write_sidecar(path, command, plan, extra);
}

int cmd_run(const GlobalOptions& g, std::uint64_t realization) {
    const auto plan = load_plan(g);
    const auto series = dqw::run_time_series(plan.lattice, plan.noise, realization, horizon(plan));
    const auto peaks = dqw::detect_peaks(series, plan.detection);
    const fs::path path = fs::path(plan.output_dir) / "series.csv";
    write_series_with_meta(series, path, "run", plan, peaks, {{"realization", realization}});
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_ensemble(const GlobalOptions& g) {
    const auto plan = load_plan(g);
    const auto series = dqw::run_ensemble(plan.lattice, plan.noise, horizon(plan), plan.threads);
    const auto peaks = dqw::detect_peaks(series, plan.detection);
    const fs::path path = fs::path(plan.output_dir) / "ensemble_series.csv";
    write_series_with_meta(series, path, "ensemble", plan, peaks);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_snapshot(const GlobalOptions& g, bool binary) {
    auto plan = load_plan(g);
    if (plan.snapshots.empty()) plan.snapshots = {dqw::SnapshotRequest::first(), dqw::SnapshotRequest::second()};

    const auto series = dqw::run_ensemble(plan.lattice, plan.noise, horizon(plan), plan.threads);
    const auto peaks = dqw::detect_peaks(series, plan.detection);
    const fs::path dir = plan.output_dir;
    write_series_with_meta(series, dir / "ensemble_series.csv", "snapshot", plan, peaks);

    const auto steps = dqw::resolve_snapshots(plan.snapshots, peaks);
    if (steps.empty()) throw std::runtime_error("no snapshot step could be resolved (peaks absent)");
    const auto snapshots = dqw::ensemble_snapshots(plan.lattice, plan.noise, steps, plan.threads);
    for (const auto& snapshot : snapshots) {
        const fs::path path = dir / ("distribution_j" + std::to_string(snapshot.step) + (binary ? ".bin" : ".csv"));
        dqw::write_distribution(snapshot, path, binary ? dqw::GridFormat::binary : dqw::GridFormat::text);
        const auto eta = dqw::height_ratio(snapshot);
        dqw::write_sidecar(path, "snapshot", plan,
                           {{"grid_size", snapshot.grid_size},
                            {"step", snapshot.step},
                            {"format", binary ? "binary" : "text"},
                            {"height_ratio", eta.background_zero ? json("inf") : json(eta.value)},
                            {"background_zero", eta.background_zero},
                            {"peaks", dqw::peaks_to_json(peaks)}});
        std::cout << "wrote " << path.string() << " (height ratio "
                  << (eta.background_zero ? std::string("inf") : dqw::format_double(eta.value)) << ")\n";
    }
    dqw::write_text(dir / "distribution.svg", dqw::heatmap_svg(snapshots));
    return 0;
}

std::vector<int> parse_grid_list(const std::string& text) {
    std::vector<int> sizes;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            std::size_t used = 0;
            const int m = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            if (m < 2 || m % 2 != 0) throw dqw::ConfigError("grid size " + token + " must be even and >= 2");
            sizes.push_back(m);
        } catch (const dqw::ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw dqw::ConfigError("--grid-sizes expects a comma-separated list of integers, got '" + token + "'");
        }
    }
    if (sizes.empty()) throw dqw::ConfigError("--grid-sizes is empty");
    return sizes;
}

int cmd_scan(const GlobalOptions& g, const std::string& grid_list) {
    auto plan = load_plan(g);
    if (!grid_list.empty()) plan.grid_sizes = parse_grid_list(grid_list);
    const auto scan = dqw::scaling_scan(plan);
    const fs::path dir = plan.output_dir;

    std::ostringstream table;
    table << "M,steps,j1,P1,j2,P2,P1_times_N,P2_times_lnN\n";
    std::vector<dqw::Curve> curves;
    for (const auto& e : scan.entries) {
        auto entry_plan = plan;
        entry_plan.lattice.grid_size = e.grid_size;
        const fs::path series_path = dir / ("series_M" + std::to_string(e.grid_size) + ".csv");
        write_series_with_meta(e.series, series_path, "scan", entry_plan, e.peaks);
        const auto opt = [](const auto& v) { return v ? dqw::format_double(static_cast<double>(*v)) : std::string(); };
        table << e.grid_size << ',' << e.steps << ',' << (e.peaks.first ? std::to_string(e.peaks.first->step) : "")
              << ',' << (e.peaks.first ? dqw::format_double(e.peaks.first->probability) : "") << ','
              << (e.peaks.second ? std::to_string(e.peaks.second->step) : "") << ','
              << (e.peaks.second ? dqw::format_double(e.peaks.second->probability) : "") << ','
              << opt(e.first_times_n) << ',' << opt(e.second_times_log) << '\n';
        curves.push_back({"M = " + std::to_string(e.grid_size), e.grid_size, e.series.probability});
    }
    const fs::path scan_path = dir / "scan.csv";
    dqw::write_text(scan_path, table.str());

    json fit = nullptr;
    if (scan.fit)
        fit = {{"slope", scan.fit->slope}, {"intercept", scan.fit->intercept}, {"r_squared", scan.fit->r_squared}};
    dqw::write_sidecar(scan_path, "scan", plan, {{"fit", fit}, {"missing_second", scan.missing_second}});

    dqw::write_text(dir / "scaling.svg", dqw::scaling_svg(dqw::scaling_points(scan), scan.fit));
    dqw::write_text(dir / "rescaled_N.svg", dqw::series_svg(curves, dqw::Rescale::nodes));
    dqw::write_text(dir / "rescaled_logN.svg", dqw::series_svg(curves, dqw::Rescale::log_nodes));

    for (const auto& e : scan.entries) {
        std::cout << "M=" << e.grid_size << " j1=" << (e.peaks.first ? std::to_string(e.peaks.first->step) : "-")
                  << " j2=" << (e.peaks.second ? std::to_string(e.peaks.second->step) : "-") << '\n';
    }
    if (scan.fit) std::cout << "fit j2 = " << scan.fit->slope << " M + " << scan.fit->intercept
                            << " (r2 = " << scan.fit->r_squared << ")\n";
    for (int m : scan.missing_second) std::cout << "M=" << m << ": no second peak, excluded from the fit\n";
    return 0;
}

int grid_size_from_sidecar(const fs::path& data_file) {
    const auto meta_file = dqw::sidecar_path(data_file);
    if (!fs::exists(meta_file)) throw dqw::ConfigError("missing metadata sidecar " + meta_file.string());
    const auto meta = json::parse(dqw::read_text(meta_file));
    if (meta.contains("grid_size")) return meta["grid_size"].get<int>();
    return meta.at("config").at("grid_size").get<int>();
}

std::vector<dqw::ScalingPoint> read_scan_table(const fs::path& path) {
    std::istringstream is(dqw::read_text(path));
    std::string line;
    std::getline(is, line);
    if (line.rfind("M,steps,j1", 0) != 0) throw dqw::ConfigError(path.string() + " is not a scan table");
    std::vector<dqw::ScalingPoint> points;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        cells.resize(8);
        dqw::ScalingPoint p{std::stoi(cells[0]), {}, {}};
        if (!cells[2].empty()) p.first = std::stoi(cells[2]);
        if (!cells[4].empty()) p.second = std::stoi(cells[4]);
        points.push_back(p);
    }
    return points;
}

int cmd_plot(const GlobalOptions& g, const std::string& kind_text, const std::string& rescale_text,
             const std::vector<std::string>& inputs, std::string output) {
    const auto kind = dqw::parse_plot_kind(kind_text);
    const auto rescale = dqw::parse_rescale(rescale_text);
    if (inputs.empty()) throw dqw::ConfigError("plot needs at least one input file");
    for (const auto& in : inputs)
        if (!fs::exists(in)) throw dqw::ConfigError("missing input " + in);

    dqw::PlotInputs plot;
    switch (kind) {
        case dqw::PlotKind::series:
        case dqw::PlotKind::rescaled_series:
            for (const auto& in : inputs) {
                const int m = grid_size_from_sidecar(in);
                plot.curves.push_back({"M = " + std::to_string(m), m, dqw::read_series(in)});
            }
            break;
        case dqw::PlotKind::scaling: {
            for (const auto& in : inputs) {
                auto pts = read_scan_table(in);
                plot.scaling.insert(plot.scaling.end(), pts.begin(), pts.end());
            }
            std::vector<std::pair<double, double>> xy;
            for (const auto& p : plot.scaling)
                if (p.second) xy.emplace_back(p.grid_size, *p.second);
            if (xy.size() >= 3) plot.fit = dqw::fit_linear(xy);
            break;
        }
        case dqw::PlotKind::heatmap:
            for (const auto& in : inputs) plot.snapshots.push_back(dqw::read_distribution(in));
            break;
    }
    if (output.empty()) output = (fs::path(g.out_dir.empty() ? "out" : g.out_dir) / (kind_text + ".svg")).string();
    dqw::emit_plot(kind, plot, rescale, output);
    std::cout << "wrote " << output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electric Dirac quantum walk search: simulation and experiment harness"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config_path, "Run configuration (key: value text)");
    app.add_option("--seed", g.seed, "Master seed, overrides the config");
    app.add_option("--threads", g.threads, "Worker threads (default: DQW_THREADS or all cores)");
    app.add_option("--out", g.out_dir, "Output directory, overrides output_dir");

    auto* run = app.add_subcommand("run", "Single-realization P_j series");
    std::uint64_t realization = 0;
    run->add_option("--realization", realization, "Noise realization index");

    auto* ensemble = app.add_subcommand("ensemble", "Noise-averaged P_j series");

    auto* snapshot = app.add_subcommand("snapshot", "Averaged probability distributions at j1/j2 or given steps");
    bool binary = false;
    snapshot->add_flag("--binary", binary, "Write dense little-endian grids instead of CSV");

    auto* scan = app.add_subcommand("scan", "Noiseless grid-size scan with j2 ~ sqrt(N) fit");
    std::string grid_list;
    scan->add_option("--grid-sizes", grid_list, "Comma-separated even grid sizes");

    auto* plot = app.add_subcommand("plot", "Render SVG figures from written outputs");
    std::string kind = "series", rescale = "none", output;
    std::vector<std::string> inputs;
    plot->add_option("--kind", kind, "series | rescaled_series | scaling | heatmap");
    plot->add_option("--rescale", rescale, "none | N | logN");
    plot->add_option("-o,--output", output, "SVG file (default <out>/<kind>.svg)");
    plot->add_option("inputs", inputs, "Series CSVs, scan.csv or distribution files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*run) return cmd_run(g, realization);
        if (*ensemble) return cmd_ensemble(g);
        if (*snapshot) return cmd_snapshot(g, binary);
        if (*scan) return cmd_scan(g, grid_list);
        if (*plot) return cmd_plot(g, kind, rescale, inputs, output);
    } catch (const dqw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeExit;
    }
    return 0;
}
