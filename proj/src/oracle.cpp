#include "dqw/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace dqw {

namespace {

// Stream domains, so a spatial overlay never coincides with any
// spatiotemporal step draw for the same seed and realization.
constexpr std::uint32_t kSpatialDomain = 0x5ba7'1a11u;
constexpr std::uint32_t kSpatiotemporalDomain = 0x7e3b'0c5du;

// The count and amplitude are part of the key, so every (M, r) cell of an
// experiment gets its own independent stream for the same seed.
std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t realization, std::uint64_t step,
                             std::uint32_t domain, std::uint64_t count, double amplitude) {
    const auto amp = std::bit_cast<std::uint64_t>(amplitude);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization),
                      static_cast<std::uint32_t>(realization >> 32),
                      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                      domain,
                      static_cast<std::uint32_t>(count), static_cast<std::uint32_t>(count >> 32),
                      static_cast<std::uint32_t>(amp), static_cast<std::uint32_t>(amp >> 32)};
    return std::mt19937_64(seq);
}

// Midpoint of one of 2^53 equal cells, strictly inside (0, 1).
double open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

void add_noise(std::span<const double> base, double charge_e, std::span<const double> noise,
               std::vector<double>& out) {
    out.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + charge_e * noise[i];
}

}  // namespace

PhaseTable::PhaseTable(int grid_size, std::vector<double> values, double signal_max,
                       TableKind kind)
    : grid_size_(grid_size), signal_max_(signal_max), kind_(kind), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(grid_size) * grid_size)
        throw ConfigError("phase table size does not match grid");
    refresh_factors();
}

void PhaseTable::assign(std::span<const double> values, TableKind kind) {
    if (values.size() != values_.size()) throw ConfigError("phase table size does not match grid");
    std::copy(values.begin(), values.end(), values_.begin());
    kind_ = kind;
    refresh_factors();
}

PhaseTable PhaseTable::zeros(int grid_size) {
    return PhaseTable(grid_size, std::vector<double>(static_cast<std::size_t>(grid_size) * grid_size),
                      0.0);
}

void PhaseTable::refresh_factors() {
    factors_.resize(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        factors_[i] = cplx(std::cos(values_[i]), -std::sin(values_[i]));
}

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::spatial: return "spatial";
        case NoiseKind::spatiotemporal: return "spatiotemporal";
    }
    return "none";
}

NoiseKind parse_noise_kind(std::string_view text) {
    if (text == "none") return NoiseKind::none;
    if (text == "spatial") return NoiseKind::spatial;
    if (text == "spatiotemporal") return NoiseKind::spatiotemporal;
    throw ConfigError("unknown noise kind '" + std::string(text) +
                      "' (expected none, spatial or spatiotemporal)");
}

int NoiseSpec::default_realizations(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::spatial: return 50;
        case NoiseKind::spatiotemporal: return 10;
        case NoiseKind::none: break;
    }
    return 1;
}

void NoiseSpec::validate() const {
    if (!(ratio >= 0.0) || !std::isfinite(ratio))
        throw ConfigError("noise_ratio must be a non-negative number");
    if (realizations < 1) throw ConfigError("realizations must be at least 1");
}

PhaseTable build_coulomb_table(const LatticeConfig& config) {
    config.validate();
    const int m = config.grid_size;
    const double c = config.center();
    std::vector<double> values(config.nodes());
    double signal_max = 0.0;
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            const double dx = p - c;
            const double dy = q - c;
            const double phi = config.charge_q / std::sqrt(dx * dx + dy * dy);
            values[static_cast<std::size_t>(p) * m + q] = config.charge_e * phi;
            signal_max = std::max(signal_max, std::abs(phi));
        }
    }
    return PhaseTable(m, std::move(values), signal_max);
}

std::vector<double> draw_noise(std::size_t count, double amplitude, std::uint64_t master_seed,
                               std::uint64_t realization, std::uint64_t step, bool per_step) {
    std::vector<double> noise(count, 0.0);
    if (amplitude == 0.0) return noise;
    auto engine = keyed_engine(master_seed, realization, per_step ? step : 0,
                               per_step ? kSpatiotemporalDomain : kSpatialDomain, count, amplitude);
    const double inward = std::nextafter(amplitude, 0.0);
    for (auto& b : noise) {
        b = (2.0 * open_unit(engine()) - 1.0) * amplitude;
        // (1 - 2^-53) * amplitude can round up onto the boundary
        if (b >= amplitude) b = inward;
        if (b <= -amplitude) b = -inward;
    }
    return noise;
}

PhaseTable overlay_spatial_noise(const PhaseTable& base, const LatticeConfig& config,
                                 const NoiseSpec& spec, std::uint64_t realization) {
    if (spec.kind != NoiseKind::spatial)
        throw ConfigError("overlay_spatial_noise requires noise kind 'spatial'");
    spec.validate();
    if (base.grid_size() != config.grid_size) throw ConfigError("phase table size does not match grid");
    const auto noise = draw_noise(base.values().size(), spec.amplitude(base), spec.master_seed,
                                  realization, 0, false);
    std::vector<double> values;
    add_noise(base.values(), config.charge_e, noise, values);
    return PhaseTable(base.grid_size(), std::move(values), base.signal_max(), TableKind::fixed);
}

PhaseTable sample_spatiotemporal_noise(const PhaseTable& base, const LatticeConfig& config,
                                       const NoiseSpec& spec, std::uint64_t realization,
                                       std::uint64_t step) {
    PhaseTable out = base;
    sample_spatiotemporal_noise_into(base, config, spec, realization, step, out);
    return out;
}

void sample_spatiotemporal_noise_into(const PhaseTable& base, const LatticeConfig& config,
                                      const NoiseSpec& spec, std::uint64_t realization,
                                      std::uint64_t step, PhaseTable& out) {
    if (spec.kind != NoiseKind::spatiotemporal)
        throw ConfigError("sample_spatiotemporal_noise requires noise kind 'spatiotemporal'");
    spec.validate();
    if (base.grid_size() != config.grid_size || out.grid_size() != base.grid_size())
        throw ConfigError("phase table size does not match grid");
    const auto noise = draw_noise(base.values().size(), spec.amplitude(base), spec.master_seed,
                                  realization, step, true);
    std::vector<double> values;
    add_noise(base.values(), config.charge_e, noise, values);
    out.assign(values, TableKind::per_step);
}

}  // namespace dqw
