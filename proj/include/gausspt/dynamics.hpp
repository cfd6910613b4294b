#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "gausspt/types.hpp"

namespace gausspt {

/// 4x4 symplectic form, blocks [[0,1],[-1,0]] per mode.
inline Mat4 symplectic_form() {
  Mat4 o = Mat4::Zero();
  o(0, 1) = 1;
  o(1, 0) = -1;
  o(2, 3) = 1;
  o(3, 2) = -1;
  return o;
}

inline Mat4 symmetrized(const Mat4& w) {
  return ((w + w.transpose()) / 2).eval();
}

/// Covariance matrix of the two-mode squeezed vacuum exp[r(c'b' - cb)]|0,0>:
/// diagonal cosh(2r)/2, <q1q2> = +sinh(2r)/2, <p1p2> = -sinh(2r)/2.
/// Built from e^{2r} and e^{-2r} directly; the naive cosh/sinh pair loses the
/// e^{-2r} half of the state to rounding once r is a few units.
inline Mat4 tmsv_initial(Scalar squeeze_r) {
  if (!(squeeze_r >= 0))
    throw std::invalid_argument("tmsv_initial: squeeze_r must be >= 0");
  const Scalar em = std::exp(-2 * squeeze_r);
  const Scalar ep = std::exp(2 * squeeze_r);
  const Scalar c = (ep - em) / 4;
  const Scalar a = c + em / 2;
  Mat4 w = Mat4::Zero();
  w.diagonal().setConstant(a);
  w(0, 2) = w(2, 0) = c;
  w(1, 3) = w(3, 1) = -c;
  return w;
}

/// Smallest eigenvalue of W + i Omega/2. Physical states satisfy
/// defect >= -1e-9; the matrix is Hermitian by construction.
inline Scalar physicality_defect(const Mat4& w) {
  CMat4 h = w.cast<Complex>();
  const Mat4 o = symplectic_form();
  h += Complex(0, Scalar(0.5)) * o.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat4> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Exact one-step update of dW/dt = A W + W A^T + Z over a fixed interval:
/// W -> f11 W f11^T + v.
struct StepPropagator {
  Mat4 f11;
  Mat4 v;
};

/// Reads the step from the exponential of the augmented block matrix
/// [[A, Z], [0, -A^T]]: f11 is the top-left block and the accumulated noise
/// integral is the top-right block times f11^T. Valid at the exceptional
/// point where A is defective and eigendecomposition is not.
inline StepPropagator make_step_propagator(const Mat4& a, const Mat4& z,
                                           Scalar dt) {
  Mat8 m = Mat8::Zero();
  m.topLeftCorner<4, 4>() = a;
  m.topRightCorner<4, 4>() = z;
  m.bottomRightCorner<4, 4>() = -a.transpose();
  const Mat8 f = (m * dt).exp();
  StepPropagator sp;
  sp.f11 = f.topLeftCorner<4, 4>();
  sp.v = symmetrized(f.topRightCorner<4, 4>() * sp.f11.transpose());
  return sp;
}

inline bool within_guard(const Mat4& w) {
  return w.allFinite() && w.cwiseAbs().maxCoeff() <= divergence_guard;
}

/// Exact solution W(t) = e^{At} W0 e^{A^T t} + integral of e^{As} Z e^{A^T s}.
inline Mat4 propagate_closed_form(const Mat4& w0, const Mat4& a, const Mat4& z,
                                  Scalar t) {
  if (!(t >= 0))
    throw std::invalid_argument("propagate_closed_form: t must be >= 0");
  if (t == 0) return symmetrized(w0);
  const StepPropagator sp = make_step_propagator(a, z, t);
  const Mat4 w = symmetrized(sp.f11 * w0 * sp.f11.transpose() + sp.v);
  if (!within_guard(w))
    throw divergence_error(
        "propagate_closed_form: covariance entry exceeded magnitude guard");
  return w;
}

/// Exact solution sampled on a uniform grid by iterating the one-step
/// propagator (the flow is time-invariant, so one augmented exponential
/// serves the whole grid). Truncates at the first out-of-guard state.
inline CovarianceSeries propagate_closed_form_series(const Mat4& w0,
                                                     const Mat4& a,
                                                     const Mat4& z,
                                                     const TrajectoryGrid& grid) {
  validate(grid);
  CovarianceSeries out;
  out.grid = grid;
  Mat4 w = symmetrized(w0);
  if (!within_guard(w)) {
    out.diverged_at = 0;
    return out;
  }
  out.states.reserve(grid.size());
  out.states.push_back(w);
  const StepPropagator sp = make_step_propagator(a, z, grid.step());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    w = symmetrized(sp.f11 * w * sp.f11.transpose() + sp.v);
    if (!within_guard(w)) {
      out.diverged_at = i;
      return out;
    }
    out.states.push_back(w);
  }
  return out;
}

/// Classical fixed-step 4th-order Runge-Kutta on dW/dt = A W + W A^T + Z.
/// The grid spacing is the integration step and must not exceed max_step.
/// Every state is symmetrized; truncates at the first out-of-guard state.
inline CovarianceSeries propagate_rk4(const Mat4& w0, const Mat4& a,
                                      const Mat4& z, const TrajectoryGrid& grid,
                                      Scalar max_step = Scalar(0.01L)) {
  validate(grid);
  if (!(max_step > 0))
    throw std::invalid_argument("propagate_rk4: max_step must be > 0");
  const Scalar h = grid.step();
  if (h > max_step * (1 + Scalar(1e-12L)))
    throw std::invalid_argument("propagate_rk4: grid step exceeds max_step");
  const auto flow = [&](const Mat4& w) {
    return (a * w + w * a.transpose() + z).eval();
  };
  CovarianceSeries out;
  out.grid = grid;
  Mat4 w = symmetrized(w0);
  if (!within_guard(w)) {
    out.diverged_at = 0;
    return out;
  }
  out.states.reserve(grid.size());
  out.states.push_back(w);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Mat4 k1 = flow(w);
    const Mat4 k2 = flow(w + (h / 2) * k1);
    const Mat4 k3 = flow(w + (h / 2) * k2);
    const Mat4 k4 = flow(w + h * k3);
    w = symmetrized(w + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4));
    if (!within_guard(w)) {
      out.diverged_at = i;
      return out;
    }
    out.states.push_back(w);
  }
  return out;
}

}  // namespace gausspt
