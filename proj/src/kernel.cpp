#include "dqw/kernel.hpp"

#include <cmath>
#include <numbers>

namespace dqw {

namespace {

// c * x + i s * y, written out so no complex-by-complex multiply is emitted.
inline cplx rotate(double c, double s, const cplx& x, const cplx& y) {
    return {c * x.real() - s * y.imag(), c * x.imag() + s * y.real()};
}

inline cplx mul(const cplx& f, const cplx& z) {
    return {f.real() * z.real() - f.imag() * z.imag(), f.real() * z.imag() + f.imag() * z.real()};
}

void check_table(const WavefunctionField& state, const PhaseTable& phases) {
    if (phases.grid_size() != state.grid_size())
        throw ConfigError("phase table is " + std::to_string(phases.grid_size()) +
                          " wide but the state is " + std::to_string(state.grid_size()));
}

}  // namespace

CoinAngles CoinAngles::for_mass(double mass_mu) {
    return {std::numbers::pi / 4 - mass_mu / 2, -std::numbers::pi / 4 - mass_mu / 2};
}

WavefunctionField shift_1(const WavefunctionField& state) {
    const int m = state.grid_size();
    WavefunctionField out(m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            out.left(p, q) = state.left(p + 1, q);
            out.right(p, q) = state.right(p - 1, q);
        }
    return out;
}

WavefunctionField shift_2(const WavefunctionField& state) {
    const int m = state.grid_size();
    WavefunctionField out(m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            out.left(p, q) = state.left(p, q + 1);
            out.right(p, q) = state.right(p, q - 1);
        }
    return out;
}

WavefunctionField coin_rotate(const WavefunctionField& state, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    WavefunctionField out(state.grid_size());
    auto l_in = state.left_plane();
    auto r_in = state.right_plane();
    auto l_out = out.left_plane();
    auto r_out = out.right_plane();
    for (std::size_t i = 0; i < l_in.size(); ++i) {
        l_out[i] = rotate(c, s, l_in[i], r_in[i]);
        r_out[i] = rotate(c, s, r_in[i], l_in[i]);
    }
    return out;
}

WavefunctionField apply_phase(const WavefunctionField& state, const PhaseTable& phases) {
    check_table(state, phases);
    WavefunctionField out(state.grid_size());
    auto f = phases.factors();
    for (std::size_t i = 0; i < f.size(); ++i) {
        out.left_plane()[i] = mul(f[i], state.left_plane()[i]);
        out.right_plane()[i] = mul(f[i], state.right_plane()[i]);
    }
    return out;
}

void step_into(const WavefunctionField& in, const PhaseTable& phases, const CoinAngles& angles,
               WavefunctionField& out) {
    check_table(in, phases);
    const int m = in.grid_size();
    if (out.grid_size() != m) out = WavefunctionField(m);

    const double c1 = std::cos(angles.plus);
    const double s1 = std::sin(angles.plus);
    const double c2 = std::cos(angles.minus);
    const double s2 = std::sin(angles.minus);

    const cplx* left = in.left_plane().data();
    const cplx* right = in.right_plane().data();
    const cplx* factor = phases.factors().data();
    cplx* left_out = out.left_plane().data();
    cplx* right_out = out.right_plane().data();

    for (int p = 0; p < m; ++p) {
        // after shift_1, row p holds L from row p+1 and R from row p-1
        const cplx* l_row = left + static_cast<std::size_t>((p + 1) % m) * m;
        const cplx* r_row = right + static_cast<std::size_t>((p + m - 1) % m) * m;
        const std::size_t base = static_cast<std::size_t>(p) * m;

        auto node = [&](int q, int q_next, int q_prev) {
            // coin(theta_plus) evaluated at the column shift_2 pulls from
            const cplx l = rotate(c1, s1, l_row[q_next], r_row[q_next]);
            const cplx r = rotate(c1, s1, r_row[q_prev], l_row[q_prev]);
            const cplx f = factor[base + q];
            left_out[base + q] = mul(f, rotate(c2, s2, l, r));
            right_out[base + q] = mul(f, rotate(c2, s2, r, l));
        };

        node(0, 1 % m, m - 1);
        for (int q = 1; q < m - 1; ++q) node(q, q + 1, q - 1);
        if (m > 1) node(m - 1, 0, m - 2);
    }
}

WavefunctionField step(const WavefunctionField& state, const PhaseTable& phases,
                       const CoinAngles& angles) {
    WavefunctionField out(state.grid_size());
    step_into(state, phases, angles, out);
    return out;
}

void advance(WavefunctionField& state, const PhaseTable& phases, const CoinAngles& angles,
             WavefunctionField& scratch) {
    step_into(state, phases, angles, scratch);
    state.swap(scratch);
}

}  // namespace dqw
