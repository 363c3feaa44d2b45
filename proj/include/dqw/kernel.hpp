#pragma once

#include "dqw/lattice.hpp"
#include "dqw/oracle.hpp"

namespace dqw {

// theta_plus = pi/4 - mu/2, theta_minus = -pi/4 - mu/2.
struct CoinAngles {
    double plus = 0.0;
    double minus = 0.0;

    static CoinAngles for_mass(double mass_mu);
};

// L(p,q) <- L(p+1,q), R(p,q) <- R(p-1,q)
WavefunctionField shift_1(const WavefunctionField& state);

// L(p,q) <- L(p,q+1), R(p,q) <- R(p,q-1)
WavefunctionField shift_2(const WavefunctionField& state);

// (L, R) <- (cos t L + i sin t R, i sin t L + cos t R) at every node.
WavefunctionField coin_rotate(const WavefunctionField& state, double theta);

// Multiplies both components at (p, q) by exp(-i e phi_pq).
WavefunctionField apply_phase(const WavefunctionField& state, const PhaseTable& phases);

// One walk step: shift_1, coin(theta_plus), shift_2, coin(theta_minus), phase.
// Fused into a single traversal; bit-identical to composing the operators above.
void step_into(const WavefunctionField& in, const PhaseTable& phases, const CoinAngles& angles,
               WavefunctionField& out);

WavefunctionField step(const WavefunctionField& state, const PhaseTable& phases,
                       const CoinAngles& angles);

// In-place step; `scratch` is resized as needed and holds the previous state afterwards.
void advance(WavefunctionField& state, const PhaseTable& phases, const CoinAngles& angles,
             WavefunctionField& scratch);

}  // namespace dqw
