#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "gausspt/dynamics.hpp"
#include "gausspt/parallel.hpp"
#include "gausspt/rng.hpp"
#include "gausspt/spectrum.hpp"
#include "gausspt/types.hpp"

namespace gausspt {

/// Moments of the two-mode squeezed vacuum summed directly in the Fock
/// basis, with closed-form geometric tail bounds on every truncated sum.
struct FockMoments {
  Scalar n;                 ///< mean occupancy per mode
  Scalar m_bc;              ///< <bc>; real for this phase convention
  Scalar fourth;            ///< <b'c'bc> (daggered pair annihilating pair)
  int cutoff;               ///< largest retained Fock index
  Scalar truncation_error;  ///< largest tail bound over the four sums
};

/// Sums P_n = sech²r tanh²ⁿr weighted moments over n = 0..cutoff. The tails
/// are geometric series with exact closed forms, so truncation_error is a
/// bound, not an estimate; results with a tail above 1e-10 are rejected
/// rather than returned.
inline FockMoments fock_tmsv_moments(Scalar squeeze_r, int cutoff) {
  if (cutoff < 10)
    throw std::invalid_argument("fock_tmsv_moments: cutoff must be >= 10");
  if (!(squeeze_r >= 0))
    throw std::invalid_argument("fock_tmsv_moments: squeeze_r must be >= 0");
  const Scalar th = std::tanh(squeeze_r);
  const Scalar x = th * th;
  const Scalar p_scale = 1 - x;
  Scalar sum_n = 0, sum_n2 = 0, sum_amp = 0;
  Scalar xn = 1;
  for (int n = 0; n <= cutoff; ++n) {
    const Scalar p = p_scale * xn;
    const Scalar nf = static_cast<Scalar>(n);
    sum_n += nf * p;
    sum_n2 += nf * nf * p;
    if (n < cutoff) sum_amp += p_scale * th * xn * (nf + 1);
    xn *= x;
  }
  Scalar tail = 0;
  if (x > 0) {
    const Scalar nc = static_cast<Scalar>(cutoff);
    const Scalar xtail = std::pow(x, nc + 1);
    const Scalar tail_p = xtail;
    const Scalar tail_n = xtail * ((nc + 1) - nc * x) / (1 - x);
    const Scalar tail_n2 =
        xtail *
        ((nc + 1) * (nc + 1) - (2 * nc * nc + 2 * nc - 1) * x + nc * nc * x * x) /
        ((1 - x) * (1 - x));
    const Scalar tail_amp = tail_n / th;
    tail = std::max(std::max(tail_p, tail_n), std::max(tail_n2, tail_amp));
  }
  if (!(tail <= Scalar(1e-10L)))
    throw std::invalid_argument(
        "fock_tmsv_moments: cutoff too small for requested squeeze_r "
        "(tail bound above 1e-10)");
  FockMoments out;
  out.n = sum_n;
  out.m_bc = sum_amp;
  out.fourth = sum_n2;
  out.cutoff = cutoff;
  out.truncation_error = tail;
  return out;
}

/// Empirical covariance of a stochastic-trajectory ensemble with per-entry
/// standard errors, one Mat4 of each per grid point.
struct EnsembleEstimate {
  TrajectoryGrid grid;
  std::vector<Mat4> mean_cm;
  std::vector<Mat4> std_err;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
};

namespace detail {

/// Upper-triangle index pairs of a symmetric 4x4 matrix.
inline constexpr std::array<std::pair<int, int>, 10> upper_pairs = {{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1},
    {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3},
}};

}  // namespace detail

/// Euler-Maruyama ensemble estimate of the covariance trajectory:
/// du = A u dt + dxi with Wiener increments of covariance Z dt, initial
/// samples drawn from tmsv_initial(p.squeeze_r). Each substep advances by
/// em_substep or less so every grid interval splits evenly.
///
/// Trajectory i owns the stream stream_seed(seed, i), and trajectories are
/// accumulated in fixed-size blocks whose partial sums are combined in
/// block order, so the result is bit-identical for any worker count.
inline EnsembleEstimate sde_ensemble(const SystemParams& p,
                                     const TrajectoryGrid& grid,
                                     std::size_t n_traj, std::uint64_t seed,
                                     double em_substep = 1e-3,
                                     unsigned n_threads = 0) {
  validate(grid);
  if (n_traj < 100)
    throw std::invalid_argument("sde_ensemble: n_traj must be >= 100");
  if (!(em_substep > 0) || em_substep > 0.005 * (1 + 1e-12))
    throw std::invalid_argument(
        "sde_ensemble: em_substep must be in (0, 0.005]");

  const Eigen::Matrix4d a = drift_matrix(p).cast<double>();
  const Eigen::Matrix4d z = noise_matrix(p).cast<double>();
  const Mat4 w0 = tmsv_initial(p.squeeze_r);
  const Eigen::Matrix4d chol0 =
      Eigen::LLT<Mat4>(w0).matrixL().toDenseMatrix().cast<double>();

  const double dt = static_cast<double>(grid.step());
  const int n_sub = std::max(1, static_cast<int>(std::ceil(
                                    dt / em_substep * (1 - 1e-12))));
  const double h = dt / n_sub;
  Eigen::Vector4d noise_std;
  for (int i = 0; i < 4; ++i) noise_std(i) = std::sqrt(h * z(i, i));

  const std::size_t n_points = grid.size();
  constexpr std::size_t block_size = 512;
  const std::size_t n_blocks = (n_traj + block_size - 1) / block_size;

  struct BlockSums {
    std::vector<std::array<long double, 10>> s1;
    std::vector<std::array<long double, 10>> s2;
  };
  std::vector<BlockSums> blocks(n_blocks);

  parallel_for_index(n_blocks, resolve_thread_count(n_threads),
                     [&](std::size_t b) {
    BlockSums& acc = blocks[b];
    acc.s1.assign(n_points, {});
    acc.s2.assign(n_points, {});
    const std::size_t begin = b * block_size;
    const std::size_t end = std::min(n_traj, begin + block_size);
    for (std::size_t traj = begin; traj < end; ++traj) {
      Xoshiro256pp rng(stream_seed(seed, traj));
      const auto fill_normals = [&](Eigen::Vector4d& out) {
        const auto [a0, a1] = rng.normal_pair();
        const auto [a2, a3] = rng.normal_pair();
        out << a0, a1, a2, a3;
      };
      Eigen::Vector4d normals;
      fill_normals(normals);
      Eigen::Vector4d u = chol0 * normals;
      const auto record = [&](std::size_t g) {
        if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 1e50)
          throw divergence_error(
              "sde_ensemble: trajectory exceeded magnitude guard");
        for (std::size_t k = 0; k < detail::upper_pairs.size(); ++k) {
          const auto& [i, j] = detail::upper_pairs[k];
          const long double prod =
              static_cast<long double>(u(i)) * static_cast<long double>(u(j));
          acc.s1[g][k] += prod;
          acc.s2[g][k] += prod * prod;
        }
      };
      record(0);
      for (std::size_t g = 1; g < n_points; ++g) {
        for (int step = 0; step < n_sub; ++step) {
          fill_normals(normals);
          u += h * (a * u) + noise_std.cwiseProduct(normals);
        }
        record(g);
      }
    }
  });

  EnsembleEstimate out;
  out.grid = grid;
  out.n_traj = n_traj;
  out.seed = seed;
  out.mean_cm.assign(n_points, Mat4::Zero());
  out.std_err.assign(n_points, Mat4::Zero());
  const long double nt = static_cast<long double>(n_traj);
  for (std::size_t g = 0; g < n_points; ++g) {
    for (std::size_t k = 0; k < detail::upper_pairs.size(); ++k) {
      long double s1 = 0, s2 = 0;
      for (const BlockSums& blk : blocks) {
        s1 += blk.s1[g][k];
        s2 += blk.s2[g][k];
      }
      const auto& [i, j] = detail::upper_pairs[k];
      const long double mean = s1 / nt;
      long double var = (s2 - s1 * s1 / nt) / (nt - 1);
      if (var < 0) var = 0;
      const long double err = std::sqrt(var / nt);
      out.mean_cm[g](i, j) = out.mean_cm[g](j, i) = static_cast<Scalar>(mean);
      out.std_err[g](i, j) = out.std_err[g](j, i) = static_cast<Scalar>(err);
    }
  }
  return out;
}

}  // namespace gausspt
