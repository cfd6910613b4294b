#pragma once

#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gausspt/io.hpp"
#include "gausspt/model.hpp"
#include "gausspt/observables.hpp"
#include "gausspt/oracle.hpp"
#include "gausspt/parallel.hpp"
#include "gausspt/reductions.hpp"
#include "gausspt/rng.hpp"
#include "gausspt/spectrum.hpp"
#include "gausspt/types.hpp"

namespace gausspt {

enum class Command { spectrum, evolve, sweep, figure, verify };
enum class OutputFormat { csv, json };
enum class Reduction { full_series, death_time, max_en, period_estimate };

/// One sweep axis: a uniformly spaced range of a named parameter.
struct AxisSpec {
  std::string name;  ///< one of G, s, r, n_th
  Scalar start = 0;
  Scalar stop = 0;
  std::size_t count = 1;
};

struct SweepSpec {
  std::vector<AxisSpec> axes;  ///< at most three, applied slowest-first
  Reduction reduction = Reduction::death_time;
  std::size_t cap = 1000000;  ///< largest allowed number of grid points
};

/// Everything a command run needs, resolved from defaults, the optional
/// config file, and command-line flags in that precedence order.
struct RunConfig {
  Command command = Command::spectrum;
  /// Canonical balanced preset so every parameter-consuming command works
  /// without flags; figure presets ignore these fields entirely.
  SystemParams params = params_from_ratio(1, 1, 1.5L, 0, 1);
  TrajectoryGrid grid{0, 20, 4000};
  bool t_end_set = false;
  bool steps_set = false;
  std::string output_path;  ///< empty: stdout (figure: current directory)
  OutputFormat format = OutputFormat::csv;
  std::optional<std::string> figure_id;
  bool emit_plot_script = true;
  unsigned threads = 0;  ///< 0: GAUSSPT_THREADS or machine parallelism
  std::uint64_t seed = 20260817ull;
  SweepSpec sweep;
};

inline const char* reduction_name(Reduction r) {
  switch (r) {
    case Reduction::full_series: return "full_series";
    case Reduction::death_time: return "death_time";
    case Reduction::max_en: return "max_en";
    case Reduction::period_estimate: return "period_estimate";
  }
  return "";
}

inline Reduction parse_reduction(const std::string& s) {
  if (s == "full_series") return Reduction::full_series;
  if (s == "death_time") return Reduction::death_time;
  if (s == "max_en") return Reduction::max_en;
  if (s == "period_estimate") return Reduction::period_estimate;
  throw std::invalid_argument("unknown reduction '" + s + "'");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format '" + s + "' (csv or json)");
}

namespace detail {

inline Scalar parse_scalar(const std::string& s, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE ||
      !std::isfinite(static_cast<double>(v)))
    throw std::invalid_argument(std::string(what) + ": invalid number '" + s +
                                "'");
  return v;
}

inline long long parse_integer(const std::string& s, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument(std::string(what) + ": invalid integer '" + s +
                                "'");
  return v;
}

inline std::uint64_t parse_seed(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw std::invalid_argument("seed: invalid integer '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s, const char* what) {
  std::string lower;
  for (char c : s)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "1" || lower == "true" || lower == "on" || lower == "yes")
    return true;
  if (lower == "0" || lower == "false" || lower == "off" || lower == "no")
    return false;
  throw std::invalid_argument(std::string(what) + ": invalid boolean '" + s +
                              "'");
}

inline AxisSpec parse_axis(const std::string& s) {
  std::array<std::string, 4> parts;
  std::size_t begin = 0;
  for (int i = 0; i < 4; ++i) {
    const std::size_t sep = s.find(':', begin);
    const bool last = i == 3;
    if (last != (sep == std::string::npos))
      throw std::invalid_argument("axis: expected name:start:stop:count, got '" +
                                  s + "'");
    parts[i] = s.substr(begin, last ? std::string::npos : sep - begin);
    begin = sep + 1;
  }
  AxisSpec axis;
  axis.name = parts[0];
  if (axis.name != "G" && axis.name != "s" && axis.name != "r" &&
      axis.name != "n_th")
    throw std::invalid_argument("axis: unknown parameter '" + axis.name +
                                "' (G, s, r, n_th)");
  axis.start = parse_scalar(parts[1], "axis start");
  axis.stop = parse_scalar(parts[2], "axis stop");
  const long long count = parse_integer(parts[3], "axis count");
  if (count < 1) throw std::invalid_argument("axis: count must be >= 1");
  if (!(axis.start <= axis.stop))
    throw std::invalid_argument("axis: start must be <= stop");
  axis.count = static_cast<std::size_t>(count);
  return axis;
}

}  // namespace detail

/// Applies a parsed config file to a RunConfig. Flag values are applied by
/// the caller afterwards, so flags override the file.
inline void apply_config_map(RunConfig& cfg,
                             const std::map<std::string, std::string>& entries) {
  std::array<std::optional<AxisSpec>, 3> axis_slots;
  for (const auto& [key, value] : entries) {
    if (key == "kappa")
      cfg.params.kappa = detail::parse_scalar(value, "kappa");
    else if (key == "s")
      cfg.params.s = detail::parse_scalar(value, "s");
    else if (key == "coupling")
      cfg.params.coupling_G = detail::parse_scalar(value, "coupling");
    else if (key == "nth")
      cfg.params.n_th = detail::parse_scalar(value, "nth");
    else if (key == "r")
      cfg.params.squeeze_r = detail::parse_scalar(value, "r");
    else if (key == "t-end") {
      cfg.grid.t_end = detail::parse_scalar(value, "t-end");
      cfg.t_end_set = true;
    } else if (key == "steps") {
      const long long steps = detail::parse_integer(value, "steps");
      if (steps < 1 || steps > 100000000)
        throw std::invalid_argument("steps: out of range");
      cfg.grid.n_steps = static_cast<int>(steps);
      cfg.steps_set = true;
    } else if (key == "out")
      cfg.output_path = value;
    else if (key == "format")
      cfg.format = parse_format(value);
    else if (key == "figure")
      cfg.figure_id = value;
    else if (key == "threads") {
      const long long threads = detail::parse_integer(value, "threads");
      if (threads < 1 || threads > 65536)
        throw std::invalid_argument("threads: out of range");
      cfg.threads = static_cast<unsigned>(threads);
    } else if (key == "seed")
      cfg.seed = detail::parse_seed(value);
    else if (key == "plot_script")
      cfg.emit_plot_script = detail::parse_bool(value, "plot_script");
    else if (key == "axis1" || key == "axis2" || key == "axis3")
      axis_slots[key[4] - '1'] = detail::parse_axis(value);
    else if (key == "reduction")
      cfg.sweep.reduction = parse_reduction(value);
    else if (key == "cap") {
      const long long cap = detail::parse_integer(value, "cap");
      if (cap < 1) throw std::invalid_argument("cap: must be >= 1");
      cfg.sweep.cap = static_cast<std::size_t>(cap);
    } else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
  for (const auto& slot : axis_slots)
    if (slot) cfg.sweep.axes.push_back(*slot);
}

namespace detail {

inline SystemParams validated_params(const RunConfig& cfg) {
  return params_from_ratio(cfg.params.kappa, cfg.params.s,
                           cfg.params.coupling_G, cfg.params.n_th,
                           cfg.params.squeeze_r);
}

/// Default trajectory horizon: [0, 20] for balanced gain/loss, [0, 10]
/// otherwise (growth overflows later anyway); default spacing 0.005.
inline TrajectoryGrid resolve_grid(const RunConfig& cfg, Scalar s) {
  TrajectoryGrid g;
  g.t0 = 0;
  g.t_end = cfg.t_end_set ? cfg.grid.t_end : (s == 1 ? Scalar(20) : Scalar(10));
  g.n_steps = cfg.steps_set
                  ? cfg.grid.n_steps
                  : static_cast<int>(std::llround(
                        static_cast<double>(g.t_end) / 0.005));
  validate(g);
  return g;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::invalid_argument("cannot open output path: " + path);
  fn(os);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline int run_spectrum(const RunConfig& cfg) {
  const SystemParams p = validated_params(cfg);
  const Scalar ratio_max =
      p.coupling_G > 0 ? p.coupling_G / p.kappa : Scalar(1.5);
  const int steps = cfg.steps_set ? cfg.grid.n_steps : 300;
  if (steps < 1) throw std::invalid_argument("spectrum: steps must be >= 1");
  std::vector<Scalar> ratios;
  ratios.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    ratios.push_back(ratio_max * static_cast<Scalar>(i) /
                     static_cast<Scalar>(steps));
  const std::vector<SpectrumRow> rows = spectrum_sweep(p, ratios);
  with_output(cfg.output_path, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::csv)
      write_spectrum_csv(os, rows);
    else
      write_spectrum_json(os, rows);
  });
  return 0;
}

inline int run_evolve(const RunConfig& cfg) {
  const SystemParams p = validated_params(cfg);
  const TrajectoryGrid grid = resolve_grid(cfg, p.s);
  const ObservableSeries series = evolve_observables(p, grid);
  with_output(cfg.output_path, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::csv)
      write_observables_csv(os, series.samples);
    else
      write_observables_json(os, series.samples);
  });
  if (series.diverged_at) {
    std::cerr << "error: trajectory diverged at t = "
              << format_sig(grid.time(*series.diverged_at))
              << "; output truncated\n";
    return 3;
  }
  return 0;
}

struct SweepPointResult {
  std::optional<Scalar> value;
  std::vector<ObservableSample> samples;
  bool diverged = false;
};

inline int run_sweep(const RunConfig& cfg) {
  const SystemParams base = validated_params(cfg);
  const SweepSpec& spec = cfg.sweep;
  if (spec.axes.empty())
    throw std::invalid_argument(
        "sweep requires at least one axis (config keys axis1..axis3)");
  if (spec.axes.size() > 3)
    throw std::invalid_argument("sweep supports at most three axes");
  for (std::size_t i = 0; i < spec.axes.size(); ++i)
    for (std::size_t j = i + 1; j < spec.axes.size(); ++j)
      if (spec.axes[i].name == spec.axes[j].name)
        throw std::invalid_argument("sweep axes must name distinct parameters");
  std::size_t total = 1;
  for (const AxisSpec& axis : spec.axes) {
    if (axis.count == 0 || total > spec.cap / axis.count)
      throw std::invalid_argument("sweep grid exceeds the point cap");
    total *= axis.count;
  }
  const TrajectoryGrid grid = resolve_grid(cfg, base.s);

  const auto axis_value = [](const AxisSpec& axis, std::size_t i) {
    if (axis.count == 1) return axis.start;
    return axis.start + (axis.stop - axis.start) * static_cast<Scalar>(i) /
                            static_cast<Scalar>(axis.count - 1);
  };
  const auto point_values = [&](std::size_t flat) {
    std::vector<Scalar> values(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const std::size_t count = spec.axes[a].count;
      values[a] = axis_value(spec.axes[a], flat % count);
      flat /= count;
    }
    return values;
  };

  std::vector<SweepPointResult> results(total);
  parallel_for_index(total, resolve_thread_count(cfg.threads),
                     [&](std::size_t flat) {
    const std::vector<Scalar> values = point_values(flat);
    SystemParams p = base;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const std::string& name = spec.axes[a].name;
      if (name == "G")
        p.coupling_G = values[a];
      else if (name == "s")
        p.s = values[a];
      else if (name == "r")
        p.squeeze_r = values[a];
      else
        p.n_th = values[a];
    }
    p = params_from_ratio(p.kappa, p.s, p.coupling_G, p.n_th, p.squeeze_r);
    const ObservableSeries series = evolve_observables(p, grid);
    SweepPointResult& res = results[flat];
    res.diverged = series.diverged_at.has_value();
    if (spec.reduction == Reduction::full_series) {
      res.samples = series.samples;
    } else if (series.samples.empty()) {
      res.value = std::nullopt;
    } else if (spec.reduction == Reduction::death_time) {
      res.value = death_time(series);
    } else if (spec.reduction == Reduction::max_en) {
      res.value = max_en(series);
    } else {
      res.value = period_estimate(series);
    }
  });

  const bool series_mode = spec.reduction == Reduction::full_series;
  with_output(cfg.output_path, [&](std::ostream& os) {
    if (cfg.format == OutputFormat::csv) {
      for (const AxisSpec& axis : spec.axes) os << axis.name << ',';
      if (series_mode)
        os << "t,e_n,antibunching,n_p,n_s";
      else
        os << reduction_name(spec.reduction);
      os << ",diverged\n";
      for (std::size_t flat = 0; flat < total; ++flat) {
        const std::vector<Scalar> values = point_values(flat);
        const SweepPointResult& res = results[flat];
        std::string prefix;
        for (const Scalar v : values) prefix += format_sig(v) + ',';
        if (series_mode) {
          for (const ObservableSample& s : res.samples) {
            os << prefix << format_sig(s.t) << ',' << format_sig(s.e_n) << ',';
            if (s.antibunch) os << format_sig(*s.antibunch);
            os << ',' << format_sig(s.n_p) << ',' << format_sig(s.n_s) << ','
               << (res.diverged ? 1 : 0) << '\n';
          }
        } else {
          os << prefix;
          if (res.value) os << format_sig(*res.value);
          os << ',' << (res.diverged ? 1 : 0) << '\n';
        }
      }
    } else {
      os << "[\n";
      bool first = true;
      std::ostringstream row;
      const auto flush_row = [&]() {
        if (!first) os << ",\n";
        os << row.str();
        row.str("");
        first = false;
      };
      for (std::size_t flat = 0; flat < total; ++flat) {
        const std::vector<Scalar> values = point_values(flat);
        const SweepPointResult& res = results[flat];
        std::string prefix;
        for (std::size_t a = 0; a < spec.axes.size(); ++a)
          prefix += "\"" + spec.axes[a].name + "\":" + format_sig(values[a]) +
                    ",";
        if (series_mode) {
          for (const ObservableSample& s : res.samples) {
            row << '{' << prefix << "\"t\":" << format_sig(s.t)
                << ",\"e_n\":" << format_sig(s.e_n) << ",\"antibunching\":"
                << (s.antibunch ? format_sig(*s.antibunch) : "null")
                << ",\"n_p\":" << format_sig(s.n_p)
                << ",\"n_s\":" << format_sig(s.n_s)
                << ",\"diverged\":" << (res.diverged ? 1 : 0) << '}';
            flush_row();
          }
        } else {
          row << '{' << prefix << '"' << reduction_name(spec.reduction)
              << "\":" << (res.value ? format_sig(*res.value) : "null")
              << ",\"diverged\":" << (res.diverged ? 1 : 0) << '}';
          flush_row();
        }
      }
      os << (first ? "]\n" : "\n]\n");
    }
  });
  return 0;
}

struct FigurePanel {
  const char* suffix;
  Scalar s;
  Scalar coupling;
  Scalar squeeze;
  std::span<const ObsColumn> columns;
};

inline constexpr std::array<ObsColumn, 3> entanglement_columns = {
    ObsColumn::time, ObsColumn::e_n, ObsColumn::antibunching};
inline constexpr std::array<ObsColumn, 3> occupancy_columns = {
    ObsColumn::time, ObsColumn::n_p, ObsColumn::n_s};
inline constexpr std::array<ObsColumn, 2> negativity_columns = {
    ObsColumn::time, ObsColumn::e_n};

inline int run_figure(const RunConfig& cfg) {
  if (!cfg.figure_id)
    throw std::invalid_argument("figure command requires --figure");
  const std::string& id = *cfg.figure_id;
  const std::filesystem::path dir =
      cfg.output_path.empty() ? std::filesystem::path(".")
                              : std::filesystem::path(cfg.output_path);
  std::filesystem::create_directories(dir);
  const char* ext = cfg.format == OutputFormat::csv ? ".csv" : ".json";

  const auto write_file = [&](const std::filesystem::path& path,
                              const auto& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw std::invalid_argument("cannot open output path: " + path.string());
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
  };

  std::ostringstream script;
  script << "# gnuplot script for " << id << "\n"
         << "set datafile separator ','\n"
         << "set term pngcairo size 1100,800\n"
         << "set output '" << id << ".png'\n";

  if (id == "fig2" || id == "fig4") {
    const Scalar s = id == "fig2" ? 1 : 2;
    const SystemParams p = params_from_ratio(1, s, 0, 0, 0);
    std::vector<Scalar> ratios;
    ratios.reserve(301);
    for (int i = 0; i <= 300; ++i)
      ratios.push_back(Scalar(1.5) * static_cast<Scalar>(i) / 300);
    const std::vector<SpectrumRow> rows = spectrum_sweep(p, ratios);
    const std::string name = id + ext;
    write_file(dir / name, [&](std::ostream& os) {
      if (cfg.format == OutputFormat::csv)
        write_spectrum_csv(os, rows);
      else
        write_spectrum_json(os, rows);
    });
    script << "set multiplot layout 1,2\n"
           << "set xlabel 'G/kappa'\n"
           << "plot '" << name << "' skip 1 using 1:2 with lines title "
           << "'Re omega+', '" << name << "' skip 1 using 1:3 with lines "
           << "title 'Re omega-'\n"
           << "plot '" << name << "' skip 1 using 1:4 with lines title "
           << "'Im omega+', '" << name << "' skip 1 using 1:5 with lines "
           << "title 'Im omega-'\n"
           << "unset multiplot\n";
    if (cfg.emit_plot_script && cfg.format == OutputFormat::csv)
      write_file(dir / (id + ".gp"),
                 [&](std::ostream& os) { os << script.str(); });
    return 0;
  }

  std::vector<FigurePanel> panels;
  if (id == "fig3" || id == "fig6") {
    const Scalar r = id == "fig3" ? 1 : 2;
    panels = {{"_a", 1, 1.5, r, entanglement_columns},
              {"_b", 1, 0.7, r, entanglement_columns},
              {"_c", 1, 1.5, r, occupancy_columns},
              {"_d", 1, 0.7, r, occupancy_columns}};
  } else if (id == "fig5" || id == "fig7") {
    const Scalar r = id == "fig5" ? 1 : 2;
    panels = {{"_a", 2, 2.3, r, entanglement_columns},
              {"_b", 2, 1.3, r, entanglement_columns},
              {"_c", 2, 2.3, r, occupancy_columns},
              {"_d", 2, 1.3, r, occupancy_columns}};
  } else if (id == "fig8") {
    panels = {{"_a", 1, 1.5, 0.1, negativity_columns},
              {"_b", 2, 2.3, 0.1, negativity_columns}};
  } else {
    throw std::invalid_argument("unknown figure id '" + id +
                                "' (fig2..fig8)");
  }

  struct CachedSeries {
    Scalar s, coupling, squeeze;
    ObservableSeries series;
  };
  std::vector<CachedSeries> cache;
  bool any_diverged = false;
  script << "set multiplot layout " << (panels.size() > 2 ? "2,2" : "1,2")
         << "\nset xlabel 't (1/kappa)'\n";
  for (const FigurePanel& panel : panels) {
    const ObservableSeries* series = nullptr;
    for (const CachedSeries& c : cache)
      if (c.s == panel.s && c.coupling == panel.coupling &&
          c.squeeze == panel.squeeze)
        series = &c.series;
    if (!series) {
      const SystemParams p =
          params_from_ratio(1, panel.s, panel.coupling, 0, panel.squeeze);
      TrajectoryGrid grid;
      grid.t0 = 0;
      grid.t_end = panel.s == 1 ? 20 : 10;
      grid.n_steps = panel.s == 1 ? 4000 : 2000;
      // Negativity-only panels tolerate weak squeezing; occupancy panels
      // need the full moment set.
      const bool negativity_only = panel.columns.size() == 2;
      cache.push_back({panel.s, panel.coupling, panel.squeeze,
                       negativity_only ? evolve_negativity(p, grid)
                                       : evolve_observables(p, grid)});
      series = &cache.back().series;
    }
    any_diverged = any_diverged || series->diverged_at.has_value();
    const std::string name = id + panel.suffix + ext;
    write_file(dir / name, [&](std::ostream& os) {
      if (cfg.format == OutputFormat::csv)
        write_samples_csv(os, series->samples, panel.columns);
      else
        write_samples_json(os, series->samples, panel.columns);
    });
    script << "plot ";
    for (std::size_t c = 1; c < panel.columns.size(); ++c)
      script << (c > 1 ? ", " : "") << "'" << name << "' skip 1 using 1:"
             << c + 1 << " with lines title '"
             << column_name(panel.columns[c]) << "'";
    script << "\n";
  }
  script << "unset multiplot\n";
  if (cfg.emit_plot_script && cfg.format == OutputFormat::csv)
    write_file(dir / (id + ".gp"),
               [&](std::ostream& os) { os << script.str(); });
  if (any_diverged) {
    std::cerr << "error: a preset trajectory diverged; output truncated\n";
    return 3;
  }
  return 0;
}

inline int run_verify(const RunConfig& cfg) {
  const auto short_sig = [](Scalar v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3Lg", static_cast<long double>(v));
    return std::string(buf);
  };
  int passed = 0;
  int total = 0;
  const auto report = [&](const char* name, bool ok, const std::string& detail) {
    ++total;
    if (ok) ++passed;
    std::cout << "verify " << name << ": " << (ok ? "pass" : "fail") << " ("
              << detail << ")\n";
  };

  {
    Xoshiro256pp rng(cfg.seed);
    Scalar worst = 0;
    for (int i = 0; i < 200; ++i) {
      const Scalar s = 3 * static_cast<Scalar>(rng.uniform());
      const Scalar coupling = 3 * static_cast<Scalar>(rng.uniform());
      const SystemParams p = params_from_ratio(1, s, coupling, 0, 0);
      worst = std::max(worst, drift_spectrum_deviation(p));
    }
    report("spectrum-consistency", worst <= Scalar(1e-10L),
           "max relative eigenvalue deviation " + short_sig(worst) +
               " over 200 random points, tolerance 1e-10");
  }

  {
    const std::array<Scalar, 4> rs = {0.1L, 0.5L, 1.0L, 2.0L};
    const std::array<int, 4> cutoffs = {60, 60, 60, 600};
    Scalar worst_anti = 0, worst_n = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const FockMoments fm = fock_tmsv_moments(rs[i], cutoffs[i]);
      const Mat4 w = tmsv_initial(rs[i]);
      const SecondMoments m = mode_moments(w);
      const Scalar anti_cm = *antibunching(m);
      const Scalar anti_fock = (fm.fourth - fm.n * fm.n) / (fm.n * fm.n);
      worst_anti = std::max(worst_anti, std::abs(anti_cm - anti_fock));
      worst_n = std::max(worst_n,
                         std::abs(m.n_p - fm.n) / std::max(Scalar(1), fm.n));
    }
    report("fock-moments",
           worst_anti <= Scalar(1e-9L) && worst_n <= Scalar(1e-8L),
           "max antibunching deviation " + short_sig(worst_anti) +
               ", max occupancy deviation " + short_sig(worst_n));
  }

  {
    const SystemParams p = params_from_ratio(1, 1, 1.5L, 0, 1);
    const TrajectoryGrid grid{0, 1, 10};
    const EnsembleEstimate est =
        sde_ensemble(p, grid, 20000, cfg.seed, 1e-3, cfg.threads);
    const CovarianceSeries exact = propagate_closed_form_series(
        tmsv_initial(p.squeeze_r), drift_matrix(p), noise_matrix(p), grid);
    std::size_t within = 0, entries = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (const auto& [i, j] : upper_pairs) {
        ++entries;
        if (std::abs(est.mean_cm[g](i, j) - exact.states[g](i, j)) <=
            3 * est.std_err[g](i, j))
          ++within;
      }
    }
    const bool ok =
        within * 100 >= entries * 99;
    report("sde-oracle", ok,
           std::to_string(within) + "/" + std::to_string(entries) +
               " covariance entries within 3 standard errors");
  }

  {
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    const std::array<std::pair<Scalar, Scalar>, 4> presets = {
        {{1, 1.5L}, {1, 0.7L}, {2, 2.3L}, {2, 1.3L}}};
    for (const auto& [s, coupling] : presets) {
      const SystemParams p = params_from_ratio(1, s, coupling, 0, 1);
      TrajectoryGrid grid;
      grid.t0 = 0;
      grid.t_end = s == 1 ? 20 : 10;
      grid.n_steps = s == 1 ? 4000 : 2000;
      const CovarianceSeries series = propagate_closed_form_series(
          tmsv_initial(p.squeeze_r), drift_matrix(p), noise_matrix(p), grid);
      for (const Mat4& w : series.states)
        worst = std::min(worst, physicality_defect(w));
    }
    report("physicality", worst >= Scalar(-1e-9L),
           "smallest noisy-trajectory defect " + short_sig(worst) +
               ", floor -1e-9");
  }

  std::cout << "verify: " << passed << "/" << total << " checks passed\n";
  return passed == total ? 0 : 4;
}

}  // namespace detail

/// Executes one resolved command. Returns the process exit code: 0 success,
/// 2 invalid arguments, 3 divergence in a non-sweep command, 4 verification
/// failure; error details go to stderr.
inline int run(const RunConfig& cfg) {
  try {
    switch (cfg.command) {
      case Command::spectrum: return detail::run_spectrum(cfg);
      case Command::evolve: return detail::run_evolve(cfg);
      case Command::sweep: return detail::run_sweep(cfg);
      case Command::figure: return detail::run_figure(cfg);
      case Command::verify: return detail::run_verify(cfg);
    }
    return 2;
  } catch (const divergence_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace gausspt
