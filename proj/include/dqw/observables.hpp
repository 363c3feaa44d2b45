#pragma once

#include <optional>
#include <vector>

#include "dqw/lattice.hpp"
#include "dqw/oracle.hpp"

namespace dqw {

// Localization probability P_j for j = 0, 1, ..., J_max. `probability[j]`
// is the value after j steps.
struct TimeSeries {
    LatticeConfig config;
    NoiseSpec noise;
    std::vector<double> probability;

    int grid_size() const { return config.grid_size; }
    int last_step() const { return static_cast<int>(probability.size()) - 1; }
};

// d_{j,p,q} = |psi_L|^2 + |psi_R|^2, row-major like the field.
struct DistributionSnapshot {
    int grid_size = 0;
    int step = 0;
    std::vector<double> values;

    double at(int p, int q) const { return values[static_cast<std::size_t>(p) * grid_size + q]; }
};

struct HeightRatio {
    double value = 0.0;
    bool background_zero = false;  // value is +inf when set
};

struct PeakDetection {
    int window = 5;                 // centered moving-average width
    double prominence_frac = 0.1;   // of (max - min) of the smoothed series
};

struct Peak {
    int step = 0;
    double probability = 0.0;
};

struct PeakRecord {
    std::optional<Peak> first;
    std::optional<Peak> second;
    PeakDetection detection;

    bool complete() const { return first && second; }
};

// Total probability on the four nodes around the potential center.
double localization_probability(const WavefunctionField& state);

DistributionSnapshot distribution_snapshot(const WavefunctionField& state, int step);

// d at (M/2-1, M/2-1) over d at the background node (1, 1).
HeightRatio height_ratio(const DistributionSnapshot& snapshot);

// Centered moving average; near the ends the window is truncated to the
// samples that exist.
std::vector<double> moving_average(const std::vector<double>& series, int window);

// Topographic prominence of the interior local maximum at `index`.
double prominence(const std::vector<double>& series, std::size_t index);

// Prominent local maxima of the smoothed series, refined to the raw argmax
// within +-window. The first peak is the earliest one with j > 0; the second
// is the highest raw peak with j > 2 * j1.
PeakRecord detect_peaks(const TimeSeries& series, const PeakDetection& detection = {});
PeakRecord detect_peaks(const std::vector<double>& probability,
                        const PeakDetection& detection = {});

}  // namespace dqw
