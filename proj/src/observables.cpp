#include "dqw/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dqw {

double localization_probability(const WavefunctionField& state) {
    const int m = state.grid_size();
    const int lo = m / 2 - 1;
    const int hi = m / 2;
    double sum = 0.0;
    for (int p : {lo, hi})
        for (int q : {lo, hi}) sum += std::norm(state.left(p, q)) + std::norm(state.right(p, q));
    return sum;
}

DistributionSnapshot distribution_snapshot(const WavefunctionField& state, int step) {
    DistributionSnapshot snapshot{state.grid_size(), step, std::vector<double>(state.nodes())};
    auto l = state.left_plane();
    auto r = state.right_plane();
    for (std::size_t i = 0; i < snapshot.values.size(); ++i)
        snapshot.values[i] = std::norm(l[i]) + std::norm(r[i]);
    return snapshot;
}

HeightRatio height_ratio(const DistributionSnapshot& snapshot) {
    const int m = snapshot.grid_size;
    if (m < 4) throw ConfigError("height ratio needs grid_size >= 4");
    const double peak = snapshot.at(m / 2 - 1, m / 2 - 1);
    const double background = snapshot.at(1, 1);
    if (background <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {peak / background, false};
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    const std::ptrdiff_t half = std::max(window, 1) / 2;
    std::vector<double> out(series.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) sum += series[k];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

double prominence(const std::vector<double>& series, std::size_t index) {
    const double height = series[index];
    double left_min = height;
    for (std::size_t k = index; k-- > 0;) {
        if (series[k] > height) break;
        left_min = std::min(left_min, series[k]);
    }
    double right_min = height;
    for (std::size_t k = index + 1; k < series.size(); ++k) {
        if (series[k] > height) break;
        right_min = std::min(right_min, series[k]);
    }
    return height - std::max(left_min, right_min);
}

PeakRecord detect_peaks(const TimeSeries& series, const PeakDetection& detection) {
    return detect_peaks(series.probability, detection);
}

PeakRecord detect_peaks(const std::vector<double>& raw, const PeakDetection& detection) {
    PeakRecord record;
    record.detection = detection;
    if (raw.size() < 3) return record;

    const auto smooth = moving_average(raw, detection.window);
    const auto [lo_it, hi_it] = std::minmax_element(smooth.begin(), smooth.end());
    const double threshold = detection.prominence_frac * (*hi_it - *lo_it);
    if (!(*hi_it > *lo_it)) return record;

    const auto refine = [&](std::size_t centre) {
        const std::size_t w = static_cast<std::size_t>(std::max(detection.window, 0));
        const std::size_t lo = centre > w ? centre - w : 0;
        const std::size_t hi = std::min(raw.size() - 1, centre + w);
        std::size_t best = lo;
        for (std::size_t k = lo + 1; k <= hi; ++k)
            if (raw[k] > raw[best]) best = k;  // earliest wins ties
        return Peak{static_cast<int>(best), raw[best]};
    };

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < smooth.size(); ++i) {
        // strict on the left, so a plateau is reported at its first sample
        if (!(smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1])) continue;
        if (prominence(smooth, i) < threshold) continue;
        const Peak peak = refine(i);
        if (peak.step > 0) peaks.push_back(peak);
    }
    if (peaks.empty()) return record;

    record.first = peaks.front();
    for (const auto& peak : peaks) {
        if (peak.step <= 2 * record.first->step) continue;
        if (!record.second || peak.probability > record.second->probability) record.second = peak;
    }
    return record;
}

}  // namespace dqw
