#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "gausspt/observables.hpp"
#include "gausspt/types.hpp"

namespace gausspt {

/// Indices of strict interior local maxima: v[i-1] < v[i] > v[i+1].
inline std::vector<std::size_t> local_maxima_indices(
    const std::vector<Scalar>& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i - 1] < v[i] && v[i] > v[i + 1]) out.push_back(i);
  return out;
}

/// Indices of strict interior local minima: v[i-1] > v[i] < v[i+1].
inline std::vector<std::size_t> local_minima_indices(
    const std::vector<Scalar>& v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i - 1] > v[i] && v[i] < v[i + 1]) out.push_back(i);
  return out;
}

inline std::vector<Scalar> entanglement_values(const ObservableSeries& s) {
  std::vector<Scalar> v;
  v.reserve(s.samples.size());
  for (const ObservableSample& smp : s.samples) v.push_back(smp.e_n);
  return v;
}

/// First grid time t_d with e_n identically 0 from t_d through the end of
/// the available horizon; no value if e_n is nonzero at the horizon end.
/// An all-zero series dies at its first sample.
inline std::optional<Scalar> death_time(const ObservableSeries& s) {
  if (s.samples.empty())
    throw std::invalid_argument("death_time: empty series");
  std::size_t last_alive = s.samples.size();
  for (std::size_t i = s.samples.size(); i-- > 0;) {
    if (s.samples[i].e_n != 0) {
      last_alive = i;
      break;
    }
  }
  if (last_alive == s.samples.size()) return s.samples.front().t;
  if (last_alive + 1 == s.samples.size()) return std::nullopt;
  return s.samples[last_alive + 1].t;
}

/// Mean spacing between successive grid-local maxima of e_n; no value when
/// fewer than three maxima are present.
inline std::optional<Scalar> period_estimate(const ObservableSeries& s) {
  if (s.samples.empty())
    throw std::invalid_argument("period_estimate: empty series");
  const std::vector<std::size_t> peaks =
      local_maxima_indices(entanglement_values(s));
  if (peaks.size() < 3) return std::nullopt;
  const Scalar first = s.samples[peaks.front()].t;
  const Scalar last = s.samples[peaks.back()].t;
  return (last - first) / static_cast<Scalar>(peaks.size() - 1);
}

/// Largest e_n over the series.
inline Scalar max_en(const ObservableSeries& s) {
  if (s.samples.empty()) throw std::invalid_argument("max_en: empty series");
  Scalar m = s.samples.front().e_n;
  for (const ObservableSample& smp : s.samples)
    if (smp.e_n > m) m = smp.e_n;
  return m;
}

}  // namespace gausspt
