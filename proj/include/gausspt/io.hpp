#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausspt/oracle.hpp"
#include "gausspt/types.hpp"

namespace gausspt {

/// 17 significant digits, the serialization width used by every emitter.
inline std::string format_sig(Scalar v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", static_cast<long double>(v));
  return buf;
}

inline void write_spectrum_csv(std::ostream& os,
                               const std::vector<SpectrumRow>& rows) {
  os << "g_over_kappa,re_omega_plus,re_omega_minus,im_omega_plus,"
        "im_omega_minus\n";
  for (const SpectrumRow& r : rows)
    os << format_sig(r.g_over_kappa) << ',' << format_sig(r.re_omega_plus)
       << ',' << format_sig(r.re_omega_minus) << ','
       << format_sig(r.im_omega_plus) << ',' << format_sig(r.im_omega_minus)
       << '\n';
}

inline void write_spectrum_json(std::ostream& os,
                                const std::vector<SpectrumRow>& rows) {
  os << "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SpectrumRow& r = rows[i];
    os << "{\"g_over_kappa\":" << format_sig(r.g_over_kappa)
       << ",\"re_omega_plus\":" << format_sig(r.re_omega_plus)
       << ",\"re_omega_minus\":" << format_sig(r.re_omega_minus)
       << ",\"im_omega_plus\":" << format_sig(r.im_omega_plus)
       << ",\"im_omega_minus\":" << format_sig(r.im_omega_minus) << '}'
       << (i + 1 == rows.size() ? "\n" : ",\n");
  }
  os << "]\n";
}

/// Column selector for observable-series emission; figure presets write
/// per-panel subsets while evolve writes all five.
enum class ObsColumn { time, e_n, antibunching, n_p, n_s };

inline constexpr std::array<ObsColumn, 5> all_observable_columns = {
    ObsColumn::time, ObsColumn::e_n, ObsColumn::antibunching, ObsColumn::n_p,
    ObsColumn::n_s};

inline const char* column_name(ObsColumn c) {
  switch (c) {
    case ObsColumn::time: return "t";
    case ObsColumn::e_n: return "e_n";
    case ObsColumn::antibunching: return "antibunching";
    case ObsColumn::n_p: return "n_p";
    case ObsColumn::n_s: return "n_s";
  }
  return "";
}

/// Undefined antibunching serializes as an empty CSV field, never as 0.
inline void write_samples_csv(std::ostream& os,
                              const std::vector<ObservableSample>& samples,
                              std::span<const ObsColumn> columns) {
  for (std::size_t i = 0; i < columns.size(); ++i)
    os << (i ? "," : "") << column_name(columns[i]);
  os << '\n';
  for (const ObservableSample& s : samples) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os << ',';
      switch (columns[i]) {
        case ObsColumn::time: os << format_sig(s.t); break;
        case ObsColumn::e_n: os << format_sig(s.e_n); break;
        case ObsColumn::antibunching:
          if (s.antibunch) os << format_sig(*s.antibunch);
          break;
        case ObsColumn::n_p: os << format_sig(s.n_p); break;
        case ObsColumn::n_s: os << format_sig(s.n_s); break;
      }
    }
    os << '\n';
  }
}

/// Undefined antibunching serializes as JSON null.
inline void write_samples_json(std::ostream& os,
                               const std::vector<ObservableSample>& samples,
                               std::span<const ObsColumn> columns) {
  os << "[\n";
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const ObservableSample& s = samples[r];
    os << '{';
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os << ',';
      os << '"' << column_name(columns[i]) << "\":";
      switch (columns[i]) {
        case ObsColumn::time: os << format_sig(s.t); break;
        case ObsColumn::e_n: os << format_sig(s.e_n); break;
        case ObsColumn::antibunching:
          if (s.antibunch)
            os << format_sig(*s.antibunch);
          else
            os << "null";
          break;
        case ObsColumn::n_p: os << format_sig(s.n_p); break;
        case ObsColumn::n_s: os << format_sig(s.n_s); break;
      }
    }
    os << '}' << (r + 1 == samples.size() ? "\n" : ",\n");
  }
  os << "]\n";
}

inline void write_observables_csv(std::ostream& os,
                                  const std::vector<ObservableSample>& samples) {
  write_samples_csv(os, samples, all_observable_columns);
}

inline void write_observables_json(std::ostream& os,
                                   const std::vector<ObservableSample>& samples) {
  write_samples_json(os, samples, all_observable_columns);
}

inline constexpr std::array<const char*, 10> covariance_column_names = {
    "w11", "w12", "w13", "w14", "w22", "w23", "w24", "w33", "w34", "w44"};

inline void write_covariance_csv(std::ostream& os,
                                 const CovarianceSeries& series) {
  os << 't';
  for (const char* name : covariance_column_names) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < series.states.size(); ++i) {
    os << format_sig(series.grid.time(i));
    const Mat4& w = series.states[i];
    for (const auto& [r, c] : detail::upper_pairs)
      os << ',' << format_sig(w(r, c));
    os << '\n';
  }
}

inline void write_covariance_json(std::ostream& os,
                                  const CovarianceSeries& series) {
  os << "[\n";
  for (std::size_t i = 0; i < series.states.size(); ++i) {
    os << "{\"t\":" << format_sig(series.grid.time(i));
    const Mat4& w = series.states[i];
    for (std::size_t k = 0; k < detail::upper_pairs.size(); ++k) {
      const auto [r, c] = detail::upper_pairs[k];
      os << ",\"" << covariance_column_names[k]
         << "\":" << format_sig(w(r, c));
    }
    os << '}' << (i + 1 == series.states.size() ? "\n" : ",\n");
  }
  os << "]\n";
}

/// Ensemble dump: mean covariance columns followed by a std_err_ column set.
inline void write_ensemble_csv(std::ostream& os, const EnsembleEstimate& est) {
  os << 't';
  for (const char* name : covariance_column_names) os << ',' << name;
  for (const char* name : covariance_column_names) os << ",std_err_" << name;
  os << '\n';
  for (std::size_t i = 0; i < est.mean_cm.size(); ++i) {
    os << format_sig(est.grid.time(i));
    for (const auto& [r, c] : detail::upper_pairs)
      os << ',' << format_sig(est.mean_cm[i](r, c));
    for (const auto& [r, c] : detail::upper_pairs)
      os << ',' << format_sig(est.std_err[i](r, c));
    os << '\n';
  }
}

/// Parses `key = value` lines; '#' starts a comment, blank lines are
/// skipped, the last occurrence of a repeated key wins.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  const auto trim = [](std::string s) {
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
  };
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    out[key] = value;
  }
  return out;
}

}  // namespace gausspt
