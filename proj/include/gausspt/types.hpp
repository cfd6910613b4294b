#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace gausspt {

/// Library scalar. The entanglement anchors require ~1e-12 absolute accuracy
/// on quantities conditioned like e^{4r}; 80-bit extended precision keeps the
/// whole pipeline comfortably inside that budget where binary64 cannot.
using Scalar = long double;
using Complex = std::complex<Scalar>;

using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
using Mat8 = Eigen::Matrix<Scalar, 8, 8>;
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
using CMat4 = Eigen::Matrix<Complex, 4, 4>;

/// Entry-magnitude bound beyond which a propagation is declared divergent.
inline constexpr Scalar divergence_guard = 1e100L;

/// Thrown when a propagated state exceeds the divergence guard in a context
/// that cannot report the event in-band.
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an input state violates a physicality precondition by more
/// than the documented tolerance.
class nonphysical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All rates in units of the cavity loss kappa; time in units of 1/kappa.
struct SystemParams {
  Scalar kappa = 1;       ///< cavity energy loss rate, > 0
  Scalar s = 1;           ///< gain-to-loss ratio, >= 0
  Scalar gamma = 1;       ///< mechanical gain rate, = s * kappa exactly
  Scalar coupling_G = 0;  ///< effective electromechanical coupling, >= 0
  Scalar n_th = 0;        ///< mean thermal phonon occupancy, >= 0
  Scalar squeeze_r = 0;   ///< initial two-mode squeezing parameter, >= 0

  /// Critical coupling of the gain/loss dimer: G_c = (gamma + kappa) / 4.
  [[nodiscard]] Scalar g_c() const { return (gamma + kappa) / 4; }
};

/// Uniform time grid with n_steps intervals over [t0, t_end].
struct TrajectoryGrid {
  Scalar t0 = 0;
  Scalar t_end = 1;
  int n_steps = 1;

  [[nodiscard]] Scalar step() const { return (t_end - t0) / n_steps; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n_steps) + 1;
  }
  [[nodiscard]] Scalar time(std::size_t i) const {
    return t0 + step() * static_cast<Scalar>(i);
  }
};

/// Validates grid invariants: t_end > t0 >= 0, n_steps >= 1.
inline void validate(const TrajectoryGrid& g) {
  if (!(g.t0 >= 0) || !(g.t_end > g.t0))
    throw std::invalid_argument("trajectory grid requires t_end > t0 >= 0");
  if (g.n_steps < 1)
    throw std::invalid_argument("trajectory grid requires n_steps >= 1");
}

/// Regime label relative to the exceptional point. Labels are only meaningful
/// for balanced gain/loss (s = 1); elsewhere the spectrum is reported raw.
enum class Phase { PTSymmetric, Broken, ExceptionalPoint, Unlabeled };

/// Supermode eigenfrequencies with the critical coupling and phase label.
struct Spectrum {
  Complex omega_plus;
  Complex omega_minus;
  Scalar g_c = 0;
  Phase phase = Phase::Unlabeled;
};

/// One row of a coupling sweep: ratio plus split eigenfrequency components.
struct SpectrumRow {
  Scalar g_over_kappa;
  Scalar re_omega_plus;
  Scalar re_omega_minus;
  Scalar im_omega_plus;
  Scalar im_omega_minus;
};

/// Covariance trajectory on a grid. states.size() == grid.size() unless the
/// divergence guard fired, in which case diverged_at holds the first bad
/// index and states is truncated to the entries before it.
struct CovarianceSeries {
  TrajectoryGrid grid;
  std::vector<Mat4> states;
  std::optional<std::size_t> diverged_at;
};

/// Physical quantities extracted from one covariance state.
struct ObservableSample {
  Scalar t = 0;
  Scalar e_n = 0;                    ///< logarithmic negativity, >= 0
  std::optional<Scalar> antibunch;   ///< undefined on vanishing occupancy
  Scalar n_p = 0;                    ///< mean cavity photon number
  Scalar n_s = 0;                    ///< mean phonon number
};

}  // namespace gausspt
