#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqw/lattice.hpp"

namespace dqw {

enum class TableKind { fixed, per_step };

// Oracle phases e*phi over the grid (radians), together with the unit
// factors exp(-i e phi) that the walk multiplies in. `signal_max` is
// max |phi| of the noiseless potential and is carried through overlays.
class PhaseTable {
  public:
    PhaseTable() = default;
    PhaseTable(int grid_size, std::vector<double> values, double signal_max,
               TableKind kind = TableKind::fixed);

    int grid_size() const { return grid_size_; }
    double signal_max() const { return signal_max_; }
    TableKind kind() const { return kind_; }

    double value(int p, int q) const { return values_[static_cast<std::size_t>(p) * grid_size_ + q]; }
    std::span<const double> values() const { return values_; }
    std::span<const cplx> factors() const { return factors_; }

    // Replaces the phases in place (same grid) and recomputes the factors.
    void assign(std::span<const double> values, TableKind kind);

    static PhaseTable zeros(int grid_size);

  private:
    void refresh_factors();

    int grid_size_ = 0;
    double signal_max_ = 0.0;
    TableKind kind_ = TableKind::fixed;
    std::vector<double> values_;
    std::vector<cplx> factors_;
};

enum class NoiseKind { none, spatial, spatiotemporal };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);  // throws ConfigError

// White-noise perturbation of the potential: B uniform on (-B_max, B_max)
// with B_max = ratio * max|phi|.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double ratio = 0.0;
    std::uint64_t master_seed = 0;
    int realizations = 1;

    // Ensemble sizes used by default: 50 for spatial, 10 for spatiotemporal.
    static int default_realizations(NoiseKind kind);

    double amplitude(const PhaseTable& base) const { return ratio * base.signal_max(); }
    void validate() const;
};

// e*Q / |(p, q) - center| in lattice units. The spacing cancels between the
// Coulomb law and phi = epsilon * V, so the table is independent of it.
PhaseTable build_coulomb_table(const LatticeConfig& config);

// One time-independent overlay per realization, keyed by (seed, realization).
PhaseTable overlay_spatial_noise(const PhaseTable& base, const LatticeConfig& config,
                                 const NoiseSpec& spec, std::uint64_t realization);

// Fresh overlay for every step, keyed by (seed, realization, step).
PhaseTable sample_spatiotemporal_noise(const PhaseTable& base, const LatticeConfig& config,
                                       const NoiseSpec& spec, std::uint64_t realization,
                                       std::uint64_t step);

// Same as above, writing into `out` to reuse its buffers inside a run loop.
void sample_spatiotemporal_noise_into(const PhaseTable& base, const LatticeConfig& config,
                                      const NoiseSpec& spec, std::uint64_t realization,
                                      std::uint64_t step, PhaseTable& out);

// The raw noise draws B (before multiplication by e), exposed for tests.
std::vector<double> draw_noise(std::size_t count, double amplitude, std::uint64_t master_seed,
                               std::uint64_t realization, std::uint64_t step, bool per_step);

}  // namespace dqw
