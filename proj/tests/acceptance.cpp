// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--long] [--threads N] [--only 1,2,...]
//
// --long adds M = 1000 to the first-peak position check.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dense_walk.hpp"
#include "dqw/experiments.hpp"
#include "dqw/io.hpp"
#include "dqw/kernel.hpp"
#include "test_support.hpp"

using namespace dqw;

namespace {

// Tolerances
constexpr double kNormDrift = 1e-10;
constexpr int kNormSteps = 2000;
constexpr double kDenseTol = 1e-12;
constexpr int kFirstPeakLo = 80;
constexpr int kFirstPeakHi = 84;
constexpr double kFirstHeightSpread = 0.15;
constexpr double kSecondTimeR2 = 0.98;
constexpr double kSecondHeightSpread = 0.20;
constexpr double kEtaNoiselessTol = 0.10;
constexpr double kEtaNoisyTol = 0.15;
constexpr double kNeutralityTol = 1e-12;
constexpr double kFixedPointTol = 1e-12;

constexpr double kSpatialRatio = 1.0 / 3.0;
constexpr int kSpatialRealizations = 50;
constexpr int kSpatiotemporalRealizations = 10;
constexpr std::uint64_t kSeed = 1;
constexpr int kDiagnosticStep = 82;

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Harness {
  public:
    explicit Harness(int threads) : threads_(threads) {}

    const ScanEntry& noiseless(int m) {
        auto it = noiseless_.find(m);
        if (it == noiseless_.end()) {
            ExperimentPlan plan;
            plan.grid_sizes = {m};
            plan.threads = 1;
            it = noiseless_.emplace(m, scaling_scan(plan).entries.front()).first;
        }
        return it->second;
    }

    // Ensemble series on the default horizon, cached by (M, kind, ratio).
    const TimeSeries& ensemble(int m, NoiseKind kind, double ratio, int realizations) {
        const auto key = std::make_tuple(m, kind, ratio);
        auto it = ensembles_.find(key);
        if (it == ensembles_.end()) {
            const NoiseSpec noise{kind, ratio, kSeed, realizations};
            it = ensembles_.emplace(key, run_ensemble(LatticeConfig::with_grid(m), noise, auto_jmax(m), threads_))
                     .first;
        }
        return it->second;
    }

    double eta_at(int m, const NoiseSpec& noise, int step) {
        return height_ratio(ensemble_snapshots(LatticeConfig::with_grid(m), noise, {step}, threads_).front()).value;
    }

    int threads() const { return threads_; }

  private:
    int threads_;
    std::map<int, ScanEntry> noiseless_;
    std::map<std::tuple<int, NoiseKind, double>, TimeSeries> ensembles_;
};

std::string peak_text(const std::optional<Peak>& peak) {
    return peak ? fmt("%d (P=%.6g)", peak->step, peak->probability) : std::string("none");
}

Outcome unitarity(Harness&) {
    const auto config = LatticeConfig::with_grid(200);
    double worst = 0.0;
    evolve(config, {}, 0, kNormSteps,
           [&](int, const WavefunctionField& s) { worst = std::max(worst, std::abs(norm_squared(s) - 1.0)); });
    return {worst < kNormDrift, fmt("M=200, %d steps: max |norm^2-1| = %.3g (tol %.0e)", kNormSteps, worst, kNormDrift)};
}

Outcome dense_oracle(Harness&) {
    const int m = 4;
    const auto u = test::dense_walk_operator(m);
    const double unitary_err =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    const auto table = build_coulomb_table(LatticeConfig::with_grid(m));
    double step_err = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto state = test::random_state(m, seed);
        const Eigen::VectorXcd expected = u * test::to_vector(state);
        step_err = std::max(step_err, test::max_abs_diff(step(state, table, CoinAngles::for_mass(0.0)), expected));
    }
    return {unitary_err < kDenseTol && step_err < kDenseTol,
            fmt("M=4: |U^H U - I| = %.3g, |step - U psi| = %.3g over 20 states (tol %.0e)", unitary_err, step_err,
                kDenseTol)};
}

Outcome first_peak_position(Harness& h, bool long_run) {
    std::vector<int> sizes{100, 200, 400};
    if (long_run) sizes.push_back(1000);
    bool pass = true;
    std::ostringstream detail;
    for (int m : sizes) {
        const auto& e = h.noiseless(m);
        const auto& first = e.peaks.first;
        const bool ok = first && first->step >= kFirstPeakLo && first->step <= kFirstPeakHi;
        pass = pass && ok;
        detail << "M=" << m << ": j1=" << (first ? std::to_string(first->step) : "none") << (ok ? "" : "(!)") << "  ";
    }
    detail << fmt("(accept [%d, %d])", kFirstPeakLo, kFirstPeakHi);
    return {pass, detail.str()};
}

Outcome first_peak_scaling(Harness& h) {
    std::vector<double> scaled;
    std::ostringstream detail;
    for (int m : {100, 200, 400}) {
        const auto& e = h.noiseless(m);
        if (!e.first_times_n) return {false, fmt("M=%d: no first peak", m)};
        scaled.push_back(*e.first_times_n);
        detail << fmt("M=%d: P*N=%.4f  ", m, *e.first_times_n);
    }
    const double spread = relative_spread(scaled);
    detail << fmt("spread %.3f (tol %.2f)", spread, kFirstHeightSpread);
    return {spread <= kFirstHeightSpread, detail.str()};
}

Outcome second_peak_time(Harness& h) {
    std::vector<std::pair<double, double>> points;
    std::ostringstream detail;
    for (int m : {100, 150, 200, 300, 400, 500}) {
        const auto& e = h.noiseless(m);
        detail << "M=" << m << ": j2=" << (e.peaks.second ? std::to_string(e.peaks.second->step) : "none") << "  ";
        if (!e.peaks.second) return {false, detail.str() + "missing second peak"};
        points.emplace_back(m, e.peaks.second->step);
    }
    const auto fit = fit_linear(points);
    detail << fmt("fit j2 = %.3f M + %.1f, r^2 = %.4f (need >= %.2f)", fit.slope, fit.intercept, fit.r_squared,
                  kSecondTimeR2);
    return {fit.r_squared >= kSecondTimeR2, detail.str()};
}

Outcome second_peak_scaling(Harness& h) {
    std::vector<double> scaled;
    std::ostringstream detail;
    for (int m : {200, 300, 400, 500}) {
        const auto& e = h.noiseless(m);
        if (!e.second_times_log) return {false, fmt("M=%d: no second peak", m)};
        scaled.push_back(*e.second_times_log);
        detail << fmt("M=%d: P*lnN=%.5f  ", m, *e.second_times_log);
    }
    const double spread = relative_spread(scaled);
    detail << fmt("spread %.3f (tol %.2f)", spread, kSecondHeightSpread);
    return {spread <= kSecondHeightSpread, detail.str()};
}

// eta at the detected peaks of the (ensemble) series against reference values.
Outcome eta_check(Harness& h, const NoiseSpec& noise, const std::map<std::pair<int, int>, double>& targets,
                  double tol, bool diagnostic) {
    bool pass = true;
    std::ostringstream detail;
    for (const auto& [key, target] : targets) {
        const auto [m, which] = key;
        const auto& series = noise.kind == NoiseKind::none
                                 ? h.noiseless(m).series
                                 : h.ensemble(m, noise.kind, noise.ratio, noise.realizations);
        const auto peaks = detect_peaks(series);
        const auto& peak = which == 1 ? peaks.first : peaks.second;
        detail << "M=" << m << " j" << which << "=";
        if (!peak) {
            pass = false;
            detail << "none(!)  ";
            continue;
        }
        const double eta = h.eta_at(m, noise, peak->step);
        const bool ok = within(eta, target, tol);
        pass = pass && ok;
        detail << fmt("%d eta=%.1f/%g%s  ", peak->step, eta, target, ok ? "" : "(!)");
    }
    if (diagnostic)
        for (int m : {200, 500})
            detail << fmt("[eta at j=%d, M=%d: %.1f] ", kDiagnosticStep, m, h.eta_at(m, noise, kDiagnosticStep));
    detail << fmt("(tol %.0f%%)", tol * 100);
    return {pass, detail.str()};
}

Outcome eta_noiseless(Harness& h) {
    return eta_check(h, {}, {{{200, 1}, 160.0}, {{200, 2}, 127.0}, {{500, 1}, 163.0}, {{500, 2}, 242.0}},
                     kEtaNoiselessTol, false);
}

Outcome eta_spatial(Harness& h) {
    const NoiseSpec noise{NoiseKind::spatial, kSpatialRatio, kSeed, kSpatialRealizations};
    return eta_check(h, noise, {{{200, 1}, 87.0}, {{200, 2}, 142.0}, {{500, 1}, 115.0}, {{500, 2}, 218.0}},
                     kEtaNoisyTol, true);
}

Outcome spatial_enhancement(Harness& h) {
    const auto& clean = h.noiseless(500).peaks;
    if (!clean.second) return {false, "noiseless M=500 has no second peak"};
    bool pass = true;
    std::ostringstream detail;
    detail << "noiseless j2=" << peak_text(clean.second) << "  ";
    for (double r : {0.1, kSpatialRatio}) {
        const auto peaks = detect_peaks(h.ensemble(500, NoiseKind::spatial, r, kSpatialRealizations));
        const bool ok = peaks.second && peaks.second->probability >= clean.second->probability &&
                        peaks.second->step >= clean.second->step;
        pass = pass && ok;
        detail << fmt("r=%.3f j2=", r) << peak_text(peaks.second) << (ok ? "" : "(!)") << "  ";
    }
    detail << "(need P2 and j2 not below noiseless)";
    return {pass, detail.str()};
}

Outcome spatiotemporal_first_peak(Harness& h) {
    const int m = 200;
    const auto& clean = h.noiseless(m);
    if (!clean.peaks.second) return {false, "noiseless M=200 has no second peak"};
    const int j2 = clean.peaks.second->step;
    bool pass = true;
    std::ostringstream detail;
    std::vector<double> level{clean.series.probability[j2]};
    for (double r : {0.25, 0.5}) {
        const auto& series = h.ensemble(m, NoiseKind::spatiotemporal, r, kSpatiotemporalRealizations);
        const auto peaks = detect_peaks(series);
        const bool ok = peaks.first && peaks.first->step >= kFirstPeakLo && peaks.first->step <= kFirstPeakHi;
        pass = pass && ok;
        level.push_back(series.probability[j2]);
        detail << fmt("r=%.2f j1=", r) << (peaks.first ? std::to_string(peaks.first->step) : "none")
               << (ok ? "" : "(!)") << "  ";
    }
    const bool ordered = level[0] > level[1] && level[1] > level[2];
    pass = pass && ordered;
    detail << fmt("P at j=%d for r=0/0.25/0.5: %.3g/%.3g/%.3g%s", j2, level[0], level[1], level[2],
                  ordered ? "" : "(!)");
    return {pass, detail.str()};
}

Outcome time_only_neutrality(Harness&) {
    const int m = 100;
    const int steps = 200;
    const auto config = LatticeConfig::with_grid(m);
    const auto table = build_coulomb_table(config);
    const auto angles = CoinAngles::for_mass(0.0);
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> offset(-3.0, 3.0);
    auto clean = init_uniform(config);
    auto shifted = clean;
    WavefunctionField scratch;
    PhaseTable per_step = table;
    std::vector<double> values(table.values().size());
    double worst = 0.0;
    for (int j = 0; j < steps; ++j) {
        const double c = offset(rng);
        std::transform(table.values().begin(), table.values().end(), values.begin(), [c](double v) { return v + c; });
        per_step.assign(values, TableKind::per_step);
        advance(clean, table, angles, scratch);
        advance(shifted, per_step, angles, scratch);
        const auto a = distribution_snapshot(clean, j + 1);
        const auto b = distribution_snapshot(shifted, j + 1);
        for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
    return {worst < kNeutralityTol,
            fmt("M=%d, %d steps, random offset per step: max |dd| = %.3g (tol %.0e)", m, steps, worst, kNeutralityTol)};
}

Outcome zero_charge(Harness&) {
    double worst = 0.0;
    for (int m : {50, 100}) {
        auto config = LatticeConfig::with_grid(m);
        config.charge_q = 0.0;
        const double expected = 4.0 / static_cast<double>(config.nodes());
        for (double p : run_time_series(config, {}, 0, 100).probability)
            worst = std::max(worst, std::abs(p - expected));
    }
    return {worst < kFixedPointTol, fmt("M in {50, 100}, j <= 100: max |P - 4/N| = %.3g (tol %.0e)", worst,
                                        kFixedPointTol)};
}

Outcome determinism(Harness&) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "dqw_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool pass = true;
    std::ostringstream detail;
    for (auto kind : {NoiseKind::spatial, NoiseKind::spatiotemporal}) {
        const auto plan = parse_config(fmt("grid_size: 40\nsteps: 120\nnoise_kind: %s\nnoise_ratio: 0.3\n"
                                           "realizations: 8\nseed: 42\n",
                                           std::string(to_string(kind)).c_str()));
        std::string bytes[2];
        int slot = 0;
        for (int threads : {1, 4}) {
            const auto series = run_ensemble(plan.lattice, plan.noise, *plan.steps, threads);
            const auto path = dir / fmt("%s_%d.csv", std::string(to_string(kind)).c_str(), threads);
            write_series(series, path);
            bytes[slot++] = read_text(path);
        }
        const bool same = bytes[0] == bytes[1];
        pass = pass && same;
        detail << to_string(kind) << (same ? ": identical  " : ": differ(!)  ");
    }
    ExperimentPlan scan;
    scan.grid_sizes = {20, 24, 28, 32};
    scan.steps = 150;
    std::string csv[2];
    int slot = 0;
    for (int threads : {1, 4}) {
        scan.threads = threads;
        std::ostringstream os;
        for (const auto& e : scaling_scan(scan).entries)
            for (double p : e.series.probability) os << format_double(p) << '\n';
        csv[slot++] = os.str();
    }
    pass = pass && csv[0] == csv[1];
    detail << (csv[0] == csv[1] ? "scan: identical" : "scan: differ(!)") << " (threads 1 vs 4)";
    return {pass, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    bool long_run = false;
    int threads = default_thread_count();
    std::vector<int> only;
    app.add_flag("--long", long_run, "Include M = 1000");
    app.add_option("--threads", threads, "Worker threads for ensembles");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    Harness h(std::max(1, threads));
    using Check = std::function<Outcome(Harness&)>;
    const std::vector<std::pair<std::string, Check>> checks{
        {"unitarity", unitarity},
        {"dense-matrix oracle", dense_oracle},
        {"first peak position", [&](Harness& x) { return first_peak_position(x, long_run); }},
        {"first peak height x N", first_peak_scaling},
        {"second peak time vs sqrt N", second_peak_time},
        {"second peak height x ln N", second_peak_scaling},
        {"height ratios, noiseless", eta_noiseless},
        {"height ratios, spatial noise r=1/3", eta_spatial},
        {"spatial-noise second-peak enhancement", spatial_enhancement},
        {"spatiotemporal first-peak robustness", spatiotemporal_first_peak},
        {"time-only noise neutrality", time_only_neutrality},
        {"zero-charge fixed point", zero_charge},
        {"determinism across thread counts", determinism},
    };
    const std::set<int> selected(only.begin(), only.end());

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = checks[i].second(h);
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += out.pass ? 0 : 1;
        std::cout << (out.pass ? "PASS" : "FAIL") << fmt(" [%2d] ", id) << checks[i].first << ": " << out.detail
                  << fmt(" [%.1fs]", secs) << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : fmt("%d criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
