#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gausspt/model.hpp"
#include "gausspt/types.hpp"

namespace gausspt {

/// Drift matrix of the quadrature vector u = (q1, p1, q2, p2), mode 1 the
/// lossy cavity, mode 2 the amplified resonator:
///   dq1 = -kappa/2 q1 - G p2,  dp1 = -kappa/2 p1 + G q2,
///   dq2 = +gamma/2 q2 - G p1,  dp2 = +gamma/2 p2 + G q1.
/// trace(A) = gamma - kappa exactly.
inline Mat4 drift_matrix(const SystemParams& p) {
  const Scalar k2 = p.kappa / 2, g2 = p.gamma / 2, G = p.coupling_G;
  Mat4 a;
  a << -k2, 0, 0, -G,
       0, -k2, G, 0,
       0, -G, g2, 0,
       G, 0, 0, g2;
  return a;
}

/// Diagonal matrix of symmetrized input-noise strengths:
/// diag(kappa/2, kappa/2, gamma (n_th + 1/2), gamma (n_th + 1/2)).
inline Mat4 noise_matrix(const SystemParams& p) {
  const Scalar zc = p.kappa / 2;
  const Scalar zm = p.gamma * (p.n_th + Scalar(0.5));
  Mat4 z = Mat4::Zero();
  z(0, 0) = zc;
  z(1, 1) = zc;
  z(2, 2) = zm;
  z(3, 3) = zm;
  return z;
}

/// Supermode eigenfrequencies
///   omega_pm = i (gamma - kappa)/4 +- sqrt(G^2 - G_c^2),  G_c = (gamma+kappa)/4,
/// using the principal square root, so below the critical coupling the root
/// contributes +i sqrt|.| to omega_plus. Phase labels apply to s = 1 only;
/// the exceptional point is labeled for any s within 1e-12 * kappa.
inline Spectrum eigenfrequencies(const SystemParams& p) {
  Spectrum out;
  out.g_c = p.g_c();
  const Scalar disc = p.coupling_G * p.coupling_G - out.g_c * out.g_c;
  const Complex root = std::sqrt(Complex(disc, 0));
  const Complex offset(0, (p.gamma - p.kappa) / 4);
  out.omega_plus = offset + root;
  out.omega_minus = offset - root;
  const Scalar ep_tol = 1e-12L * p.kappa;
  if (std::abs(p.coupling_G - out.g_c) <= ep_tol)
    out.phase = Phase::ExceptionalPoint;
  else if (p.s == 1)
    out.phase = p.coupling_G > out.g_c ? Phase::PTSymmetric : Phase::Broken;
  else
    out.phase = Phase::Unlabeled;
  return out;
}

/// Sweeps the coupling ratio G/kappa; each row is exactly the single-point
/// eigenfrequencies result. Rejects empty input and negative ratios.
inline std::vector<SpectrumRow> spectrum_sweep(
    const SystemParams& p_template, const std::vector<Scalar>& g_over_kappa) {
  if (g_over_kappa.empty())
    throw std::invalid_argument("spectrum_sweep: empty ratio list");
  std::vector<SpectrumRow> rows;
  rows.reserve(g_over_kappa.size());
  for (Scalar ratio : g_over_kappa) {
    if (!std::isfinite(static_cast<double>(ratio)) || ratio < 0)
      throw std::invalid_argument(
          "spectrum_sweep: ratios must be finite and >= 0");
    SystemParams p = p_template;
    p.coupling_G = ratio * p.kappa;
    const Spectrum sp = eigenfrequencies(p);
    rows.push_back({ratio, sp.omega_plus.real(), sp.omega_minus.real(),
                    sp.omega_plus.imag(), sp.omega_minus.imag()});
  }
  return rows;
}

/// Largest relative deviation between the numerically solved eigenvalues of
/// the drift matrix and the closed-form multiset {-i omega+, -i omega-},
/// each expected twice. Matching minimizes over all pairings, which stays
/// robust when roundoff jitters otherwise-equal real parts.
inline Scalar drift_spectrum_deviation(const SystemParams& p) {
  const Eigen::EigenSolver<Mat4> solver(drift_matrix(p));
  std::array<Complex, 4> numeric;
  for (int i = 0; i < 4; ++i) numeric[i] = solver.eigenvalues()(i);
  const Spectrum sp = eigenfrequencies(p);
  const auto to_lambda = [](Complex omega) {
    return Complex(omega.imag(), -omega.real());
  };
  std::array<Complex, 4> expected = {to_lambda(sp.omega_plus),
                                     to_lambda(sp.omega_plus),
                                     to_lambda(sp.omega_minus),
                                     to_lambda(sp.omega_minus)};
  std::array<int, 4> perm = {0, 1, 2, 3};
  Scalar best = std::numeric_limits<Scalar>::infinity();
  do {
    Scalar worst = 0;
    for (int i = 0; i < 4; ++i) {
      const Scalar ref = std::max(Scalar(1), std::abs(expected[i]));
      worst = std::max(worst, std::abs(numeric[perm[i]] - expected[i]) / ref);
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Result of the dispersive reduction. within_dispersive_regime is false when
/// g/delta_c or lambda/delta_m exceeds 0.1 and the closed forms are suspect.
struct DispersiveResult {
  Scalar omega_c0;
  Scalar omega_m0;
  Scalar coupling_G;
  bool within_dispersive_regime;
};

/// Closed-form dispersive reduction:
///   omega_c0 = omega_c - g^2/delta_c,  omega_m0 = omega_m - lambda^2/delta_m,
///   G = g lambda (delta_c + delta_m) / (2 delta_c delta_m).
inline DispersiveResult dispersive_reduction(const DispersiveInputs& in) {
  if (!(in.delta_c > 0) || !(in.delta_m > 0))
    throw std::invalid_argument(
        "dispersive_reduction: detunings must be > 0");
  DispersiveResult r;
  r.omega_c0 = in.omega_c - in.g * in.g / in.delta_c;
  r.omega_m0 = in.omega_m - in.lambda * in.lambda / in.delta_m;
  r.coupling_G =
      in.g * in.lambda * (in.delta_c + in.delta_m) / (2 * in.delta_c * in.delta_m);
  r.within_dispersive_regime =
      std::abs(in.g) / in.delta_c <= Scalar(0.1) &&
      std::abs(in.lambda) / in.delta_m <= Scalar(0.1);
  return r;
}

}  // namespace gausspt
