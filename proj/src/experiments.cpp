#include "dqw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dqw {

int auto_jmax(int grid_size, const HorizonRule& rule) {
    return static_cast<int>(std::ceil(rule.slope * grid_size + rule.offset));
}

ScalingFit fit_linear(const std::vector<std::pair<double, double>>& points) {
    ScalingFit fit;
    fit.points = points;
    const double n = static_cast<double>(points.size());
    if (points.size() < 2) throw std::invalid_argument("a linear fit needs at least two points");
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if (sxx == 0.0) throw std::invalid_argument("a linear fit needs two distinct abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return fit;
}

double relative_spread(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    return (*hi - *lo) / mean;
}

int default_thread_count() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void evolve(const LatticeConfig& config, const NoiseSpec& noise, std::uint64_t realization,
            int steps, const StepObserver& observer) {
    config.validate();
    noise.validate();
    if (steps < 0) throw ConfigError("step count must be non-negative");

    const PhaseTable base = build_coulomb_table(config);
    PhaseTable table = noise.kind == NoiseKind::spatial
                           ? overlay_spatial_noise(base, config, noise, realization)
                           : base;
    const CoinAngles angles = CoinAngles::for_mass(config.mass_mu);

    WavefunctionField state = init_uniform(config);
    WavefunctionField scratch(config.grid_size);
    observer(0, state);
    for (int j = 0; j < steps; ++j) {
        if (noise.kind == NoiseKind::spatiotemporal)
            sample_spatiotemporal_noise_into(base, config, noise, realization,
                                             static_cast<std::uint64_t>(j), table);
        advance(state, table, angles, scratch);
        observer(j + 1, state);
    }
}

TimeSeries run_time_series(const LatticeConfig& config, const NoiseSpec& noise,
                           std::uint64_t realization, int steps) {
    if (steps < 1) throw ConfigError("steps must be at least 1");
    TimeSeries series{config, noise, {}};
    series.probability.reserve(static_cast<std::size_t>(steps) + 1);
    evolve(config, noise, realization, steps, [&](int, const WavefunctionField& state) {
        series.probability.push_back(localization_probability(state));
    });
    return series;
}

namespace {

std::size_t realization_count(const NoiseSpec& noise) {
    return noise.kind == NoiseKind::none ? 1 : static_cast<std::size_t>(noise.realizations);
}

}  // namespace

TimeSeries run_ensemble(const LatticeConfig& config, const NoiseSpec& noise, int steps,
                        int threads) {
    noise.validate();
    const std::size_t count = realization_count(noise);
    TimeSeries mean{config, noise, std::vector<double>(static_cast<std::size_t>(steps) + 1, 0.0)};

    ordered_parallel<std::vector<double>>(
        count, threads,
        [&](std::size_t r) { return run_time_series(config, noise, r, steps).probability; },
        [&](std::size_t, std::vector<double>&& p) {
            for (std::size_t j = 0; j < p.size(); ++j) mean.probability[j] += p[j];
        });
    for (auto& p : mean.probability) p /= static_cast<double>(count);
    return mean;
}

std::vector<DistributionSnapshot> ensemble_snapshots(const LatticeConfig& config,
                                                     const NoiseSpec& noise,
                                                     const std::vector<int>& steps,
                                                     int threads) {
    noise.validate();
    std::vector<DistributionSnapshot> mean;
    for (int j : steps) {
        if (j < 0) throw ConfigError("snapshot step must be non-negative");
        mean.push_back({config.grid_size, j, std::vector<double>(config.nodes(), 0.0)});
    }
    if (steps.empty()) return mean;
    const int horizon = *std::max_element(steps.begin(), steps.end());
    const std::size_t count = realization_count(noise);

    using Batch = std::vector<DistributionSnapshot>;
    ordered_parallel<Batch>(
        count, threads,
        [&](std::size_t r) {
            Batch taken(steps.size());
            evolve(config, noise, r, horizon, [&](int j, const WavefunctionField& state) {
                for (std::size_t k = 0; k < steps.size(); ++k)
                    if (steps[k] == j) taken[k] = distribution_snapshot(state, j);
            });
            return taken;
        },
        [&](std::size_t, Batch&& taken) {
            for (std::size_t k = 0; k < taken.size(); ++k)
                for (std::size_t i = 0; i < taken[k].values.size(); ++i)
                    mean[k].values[i] += taken[k].values[i];
        });
    for (auto& snapshot : mean)
        for (auto& d : snapshot.values) d /= static_cast<double>(count);
    return mean;
}

std::vector<int> resolve_snapshots(const std::vector<SnapshotRequest>& requests,
                                   const PeakRecord& peaks) {
    std::vector<int> steps;
    for (const auto& request : requests) {
        switch (request.kind) {
            case SnapshotRequest::Kind::step: steps.push_back(request.step); break;
            case SnapshotRequest::Kind::first_peak:
                if (peaks.first) steps.push_back(peaks.first->step);
                break;
            case SnapshotRequest::Kind::second_peak:
                if (peaks.second) steps.push_back(peaks.second->step);
                break;
        }
    }
    return steps;
}

ScanResult scaling_scan(const ExperimentPlan& plan) {
    if (plan.grid_sizes.empty()) throw ConfigError("scan needs at least one grid size");
    ScanResult result;
    const NoiseSpec noiseless{NoiseKind::none, 0.0, plan.noise.master_seed, 1};

    ordered_parallel<ScanEntry>(
        plan.grid_sizes.size(), plan.threads,
        [&](std::size_t i) {
            LatticeConfig config = plan.lattice;
            config.grid_size = plan.grid_sizes[i];
            ScanEntry entry;
            entry.grid_size = config.grid_size;
            entry.steps = plan.horizon_for(config.grid_size);
            entry.series = run_time_series(config, noiseless, 0, entry.steps);
            entry.peaks = detect_peaks(entry.series, plan.detection);
            const double n = static_cast<double>(config.nodes());
            if (entry.peaks.first) entry.first_times_n = entry.peaks.first->probability * n;
            if (entry.peaks.second)
                entry.second_times_log = entry.peaks.second->probability * std::log(n);
            return entry;
        },
        [&](std::size_t, ScanEntry&& entry) { result.entries.push_back(std::move(entry)); });

    std::vector<std::pair<double, double>> points;
    for (const auto& entry : result.entries) {
        if (entry.peaks.second)
            points.emplace_back(entry.grid_size, entry.peaks.second->step);
        else
            result.missing_second.push_back(entry.grid_size);
    }
    if (points.size() >= 3) result.fit = fit_linear(points);
    return result;
}

}  // namespace dqw
