#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqw {

using cplx = std::complex<double>;

// Invalid user-supplied configuration (bad grid size, dimension mismatch,
// wrong noise kind...). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Physical and lattice parameters of the electric Dirac walk.
//
// The grid is M x M with periodic boundaries. The Coulomb source sits at
// (M/2 - 1/2, M/2 - 1/2), equidistant from the four central nodes, which is
// why M has to be even.
struct LatticeConfig {
    int grid_size = 0;       // M, nodes per side
    double charge_e = -1.0;  // walker charge
    double charge_q = 0.9;   // source charge
    double mass_mu = 0.0;    // mass parameter entering the coin angles
    double spacing = 1.0;    // lattice spacing epsilon

    static LatticeConfig with_grid(int grid_size);

    // Throws ConfigError unless M >= 2, M even and spacing > 0.
    void validate() const;

    std::size_t nodes() const { return static_cast<std::size_t>(grid_size) * grid_size; }
    double center() const { return 0.5 * grid_size - 0.5; }
};

// Two-component spinor field on the periodic grid, stored as two row-major
// planes (struct-of-arrays). Node (p, q) lives at index p * M + q.
class WavefunctionField {
  public:
    WavefunctionField() = default;
    explicit WavefunctionField(int grid_size);

    int grid_size() const { return grid_size_; }
    std::size_t nodes() const { return left_.size(); }

    std::size_t index(int p, int q) const;  // wraps p and q modulo M

    cplx& left(int p, int q) { return left_[index(p, q)]; }
    cplx& right(int p, int q) { return right_[index(p, q)]; }
    const cplx& left(int p, int q) const { return left_[index(p, q)]; }
    const cplx& right(int p, int q) const { return right_[index(p, q)]; }

    std::span<cplx> left_plane() { return left_; }
    std::span<cplx> right_plane() { return right_; }
    std::span<const cplx> left_plane() const { return left_; }
    std::span<const cplx> right_plane() const { return right_; }

    void swap(WavefunctionField& other) noexcept;

    friend bool operator==(const WavefunctionField&, const WavefunctionField&) = default;

  private:
    int grid_size_ = 0;
    std::vector<cplx> left_;
    std::vector<cplx> right_;
};

// Fully delocalized walker: every component equals 1 / (M sqrt 2).
WavefunctionField init_uniform(const LatticeConfig& config);

double norm_squared(const WavefunctionField& state);

}  // namespace dqw
