#include "dqw/lattice.hpp"

#include <cmath>

namespace dqw {

LatticeConfig LatticeConfig::with_grid(int grid_size) {
    LatticeConfig config;
    config.grid_size = grid_size;
    return config;
}

void LatticeConfig::validate() const {
    if (grid_size < 2)
        throw ConfigError("grid_size must be at least 2, got " + std::to_string(grid_size));
    if (grid_size % 2 != 0)
        throw ConfigError("grid_size must be even, got " + std::to_string(grid_size));
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ConfigError("lattice spacing must be positive");
    if (!std::isfinite(charge_e) || !std::isfinite(charge_q) || !std::isfinite(mass_mu))
        throw ConfigError("charges and mass must be finite");
}

WavefunctionField::WavefunctionField(int grid_size)
    : grid_size_(grid_size),
      left_(static_cast<std::size_t>(grid_size) * grid_size),
      right_(static_cast<std::size_t>(grid_size) * grid_size) {
    if (grid_size < 1) throw ConfigError("grid_size must be positive");
}

std::size_t WavefunctionField::index(int p, int q) const {
    const int m = grid_size_;
    p %= m;
    q %= m;
    if (p < 0) p += m;
    if (q < 0) q += m;
    return static_cast<std::size_t>(p) * m + q;
}

void WavefunctionField::swap(WavefunctionField& other) noexcept {
    std::swap(grid_size_, other.grid_size_);
    left_.swap(other.left_);
    right_.swap(other.right_);
}

WavefunctionField init_uniform(const LatticeConfig& config) {
    config.validate();
    WavefunctionField field(config.grid_size);
    const cplx amplitude(1.0 / (config.grid_size * std::sqrt(2.0)), 0.0);
    std::fill(field.left_plane().begin(), field.left_plane().end(), amplitude);
    std::fill(field.right_plane().begin(), field.right_plane().end(), amplitude);
    return field;
}

double norm_squared(const WavefunctionField& state) {
    double sum = 0.0;
    for (const auto& z : state.left_plane()) sum += std::norm(z);
    for (const auto& z : state.right_plane()) sum += std::norm(z);
    return sum;
}

}  // namespace dqw
