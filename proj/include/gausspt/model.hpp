#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gausspt/types.hpp"

namespace gausspt {

/// SI constants. thermal_occupancy is the only operation that touches
/// dimensional units; everything else works in kappa = 1 normalization.
inline constexpr Scalar planck_h = 6.62607015e-34L;   // J s, exact
inline constexpr Scalar boltzmann_k = 1.380649e-23L;  // J/K, exact

/// Mean thermal occupancy of a mode at angular frequency omega_m0 (rad/s)
/// and temperature T (kelvin): 1 / (exp(hbar omega / k_B T) - 1).
/// Returns 0 at T = 0. Rejects nonpositive frequencies.
inline Scalar thermal_occupancy(Scalar omega_m0, Scalar temperature) {
  if (!(omega_m0 > 0))
    throw std::invalid_argument("thermal_occupancy: omega_m0 must be > 0");
  if (temperature < 0)
    throw std::invalid_argument("thermal_occupancy: temperature must be >= 0");
  if (temperature == 0) return 0;
  const Scalar hbar = planck_h / (2 * std::numbers::pi_v<Scalar>);
  const Scalar x = hbar * omega_m0 / (boltzmann_k * temperature);
  return 1 / std::expm1(x);
}

/// Builds a validated parameter set with gamma = s * kappa.
inline SystemParams params_from_ratio(Scalar kappa, Scalar s, Scalar coupling_G,
                                      Scalar n_th, Scalar squeeze_r) {
  if (!(kappa > 0)) throw std::invalid_argument("params: kappa must be > 0");
  if (!(s >= 0)) throw std::invalid_argument("params: s must be >= 0");
  if (!(coupling_G >= 0))
    throw std::invalid_argument("params: coupling_G must be >= 0");
  if (!(n_th >= 0)) throw std::invalid_argument("params: n_th must be >= 0");
  if (!(squeeze_r >= 0))
    throw std::invalid_argument("params: squeeze_r must be >= 0");
  SystemParams p;
  p.kappa = kappa;
  p.s = s;
  p.gamma = s * kappa;
  p.coupling_G = coupling_G;
  p.n_th = n_th;
  p.squeeze_r = squeeze_r;
  return p;
}

/// Inputs of the dispersive reduction: qubit couplings and detunings.
/// Both detunings must be positive (dispersive sign convention).
struct DispersiveInputs {
  Scalar g = 0;        ///< qubit-cavity coupling (rad/s)
  Scalar lambda = 0;   ///< qubit-resonator coupling (rad/s)
  Scalar delta_c = 0;  ///< qubit-cavity detuning, > 0
  Scalar delta_m = 0;  ///< qubit-resonator detuning, > 0
  Scalar omega_c = 0;  ///< bare cavity frequency
  Scalar omega_m = 0;  ///< bare resonator frequency
};

}  // namespace gausspt
