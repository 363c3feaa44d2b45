#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dqw/kernel.hpp"
#include "dqw/lattice.hpp"
#include "dqw/observables.hpp"
#include "dqw/oracle.hpp"

namespace dqw {

// Simulation horizon J_max = ceil(slope * M + offset).
//
// Calibrated on noiseless pilot scans: the horizon has to contain the first
// prominent revival after j1 (~2M for M <= 200, ~0.7M once M >= 300) while
// stopping before the ~2M revival overtakes it on large grids.
struct HorizonRule {
    double slope = 0.9;
    double offset = 250.0;
};

int auto_jmax(int grid_size, const HorizonRule& rule = {});

// A snapshot step given either literally or as one of the detected peaks.
struct SnapshotRequest {
    enum class Kind { step, first_peak, second_peak };
    Kind kind = Kind::step;
    int step = 0;

    static SnapshotRequest at(int step) { return {Kind::step, step}; }
    static SnapshotRequest first() { return {Kind::first_peak, 0}; }
    static SnapshotRequest second() { return {Kind::second_peak, 0}; }
};

struct ExperimentPlan {
    std::vector<int> grid_sizes;
    std::optional<int> steps;  // nullopt: auto_jmax per grid size
    LatticeConfig lattice;     // physics; grid_size is overridden per scan entry
    NoiseSpec noise;
    std::vector<SnapshotRequest> snapshots;
    PeakDetection detection;
    HorizonRule horizon;
    int threads = 1;
    std::string output_dir = "out";

    int horizon_for(int grid_size) const { return steps ? *steps : auto_jmax(grid_size, horizon); }
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (sqrt N, j2)
};

// Ordinary least squares y = slope * x + intercept. Needs >= 2 distinct x.
ScalingFit fit_linear(const std::vector<std::pair<double, double>>& points);

// Max minus min over the mean; 0 for fewer than two values.
double relative_spread(const std::vector<double>& values);

// Called with (j, state) for j = 0..J_max, after the state has been advanced j times.
using StepObserver = std::function<void(int, const WavefunctionField&)>;

// Evolves the uniform state for `steps` steps with the requested noise and
// reports every intermediate state. This is the single evolution loop that
// every experiment goes through.
void evolve(const LatticeConfig& config, const NoiseSpec& noise, std::uint64_t realization,
            int steps, const StepObserver& observer);

TimeSeries run_time_series(const LatticeConfig& config, const NoiseSpec& noise,
                           std::uint64_t realization, int steps);

// Mean of P_j over noise.realizations realizations (one for kind none). The
// reduction runs in realization order whatever the thread count.
TimeSeries run_ensemble(const LatticeConfig& config, const NoiseSpec& noise, int steps,
                        int threads = 1);

// Ensemble-averaged distributions at the given steps (second pass of the
// snapshot workflow). Returned in the order of `steps`.
std::vector<DistributionSnapshot> ensemble_snapshots(const LatticeConfig& config,
                                                     const NoiseSpec& noise,
                                                     const std::vector<int>& steps,
                                                     int threads = 1);

// Turns symbolic requests into steps using a detected peak record. Requests
// for an absent peak are dropped.
std::vector<int> resolve_snapshots(const std::vector<SnapshotRequest>& requests,
                                   const PeakRecord& peaks);

struct ScanEntry {
    int grid_size = 0;
    int steps = 0;
    PeakRecord peaks;
    TimeSeries series;
    std::optional<double> first_times_n;     // P_j1 * N
    std::optional<double> second_times_log;  // P_j2 * ln N
};

struct ScanResult {
    std::vector<ScanEntry> entries;
    std::optional<ScalingFit> fit;       // j2 against sqrt N = M
    std::vector<int> missing_second;     // grid sizes left out of the fit
};

// Noiseless series for every grid size (in parallel across sizes), peak
// detection and the j2 ~ sqrt N fit when at least three sizes have a j2.
ScanResult scaling_scan(const ExperimentPlan& plan);

// Runs `count` independent tasks on up to `threads` workers in batches and
// hands each result to `reduce` in index order.
template <typename T>
void ordered_parallel(std::size_t count, int threads, const std::function<T(std::size_t)>& task,
                      const std::function<void(std::size_t, T&&)>& reduce);

int default_thread_count();

}  // namespace dqw

#include "dqw/detail/parallel.hpp"
