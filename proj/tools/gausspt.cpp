// Command-line front end. Precedence: built-in defaults, then the config
// file, then explicit flags.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gausspt/gausspt.hpp"

namespace {

struct FlagValues {
  std::string config;
  std::string kappa, s, coupling, nth, r;
  std::string t_end, steps;
  std::string out, format, figure, figure_pos, threads, seed, plot_script;
  std::string axis1, axis2, axis3, reduction, cap;
};

void add_common_options(CLI::App* cmd, FlagValues& fv) {
  cmd->add_option("--config", fv.config, "config file (key = value lines)");
  cmd->add_option("--kappa", fv.kappa, "cavity decay rate");
  cmd->add_option("--s", fv.s, "gain-to-loss ratio gamma/kappa");
  cmd->add_option("--coupling", fv.coupling, "effective coupling G");
  cmd->add_option("--nth", fv.nth, "thermal occupancy of the gain bath");
  cmd->add_option("--r", fv.r, "initial two-mode squeeze parameter");
  cmd->add_option("--t-end", fv.t_end, "trajectory horizon");
  cmd->add_option("--steps", fv.steps, "trajectory steps (grid points - 1)");
  cmd->add_option("--out", fv.out, "output path (default stdout)");
  cmd->add_option("--format", fv.format, "csv or json");
  cmd->add_option("--figure", fv.figure, "figure preset id (fig2..fig8)");
  cmd->add_option("--threads", fv.threads, "worker threads");
  cmd->add_option("--seed", fv.seed, "base RNG seed");
  cmd->add_option("--plot-script", fv.plot_script,
                  "emit a gnuplot script next to figure data (true/false)");
  cmd->add_option("--axis1", fv.axis1, "sweep axis, name:start:stop:count");
  cmd->add_option("--axis2", fv.axis2, "second sweep axis");
  cmd->add_option("--axis3", fv.axis3, "third sweep axis");
  cmd->add_option("--reduction", fv.reduction,
                  "sweep reduction: full_series, death_time, max_en, "
                  "period_estimate");
  cmd->add_option("--cap", fv.cap, "sweep grid point cap");
}

int fill_config(gausspt::RunConfig& cfg, const FlagValues& fv) {
  if (!fv.config.empty()) {
    std::ifstream in(fv.config);
    if (!in) {
      std::cerr << "error: cannot open config file: " << fv.config << '\n';
      return 2;
    }
    gausspt::apply_config_map(cfg, gausspt::parse_config(in));
  }
  std::map<std::string, std::string> flags;
  if (!fv.kappa.empty()) flags["kappa"] = fv.kappa;
  if (!fv.s.empty()) flags["s"] = fv.s;
  if (!fv.coupling.empty()) flags["coupling"] = fv.coupling;
  if (!fv.nth.empty()) flags["nth"] = fv.nth;
  if (!fv.r.empty()) flags["r"] = fv.r;
  if (!fv.t_end.empty()) flags["t-end"] = fv.t_end;
  if (!fv.steps.empty()) flags["steps"] = fv.steps;
  if (!fv.out.empty()) flags["out"] = fv.out;
  if (!fv.format.empty()) flags["format"] = fv.format;
  if (!fv.figure.empty()) flags["figure"] = fv.figure;
  if (!fv.threads.empty()) flags["threads"] = fv.threads;
  if (!fv.seed.empty()) flags["seed"] = fv.seed;
  if (!fv.plot_script.empty()) flags["plot_script"] = fv.plot_script;
  if (!fv.axis1.empty()) flags["axis1"] = fv.axis1;
  if (!fv.axis2.empty()) flags["axis2"] = fv.axis2;
  if (!fv.axis3.empty()) flags["axis3"] = fv.axis3;
  if (!fv.reduction.empty()) flags["reduction"] = fv.reduction;
  if (!fv.cap.empty()) flags["cap"] = fv.cap;
  // Flags override any axes the config file declared.
  if (flags.count("axis1") || flags.count("axis2") || flags.count("axis3"))
    cfg.sweep.axes.clear();
  gausspt::apply_config_map(cfg, flags);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian dynamics of a coupled gain/loss bosonic pair"};
  app.require_subcommand(1);

  FlagValues fv;
  CLI::App* cmd_spectrum =
      app.add_subcommand("spectrum", "supermode frequencies against G/kappa");
  CLI::App* cmd_evolve =
      app.add_subcommand("evolve", "observable series from a squeezed start");
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "reduction over a parameter grid");
  CLI::App* cmd_figure =
      app.add_subcommand("figure", "canned data sets for standard plots");
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "cross-check the fast paths against oracles");
  for (CLI::App* cmd :
       {cmd_spectrum, cmd_evolve, cmd_sweep, cmd_figure, cmd_verify})
    add_common_options(cmd, fv);
  cmd_figure->add_option("id", fv.figure_pos,
                         "figure preset id, shorthand for --figure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  gausspt::RunConfig cfg;
  if (cmd_spectrum->parsed())
    cfg.command = gausspt::Command::spectrum;
  else if (cmd_evolve->parsed())
    cfg.command = gausspt::Command::evolve;
  else if (cmd_sweep->parsed())
    cfg.command = gausspt::Command::sweep;
  else if (cmd_figure->parsed())
    cfg.command = gausspt::Command::figure;
  else
    cfg.command = gausspt::Command::verify;

  if (fv.figure.empty()) fv.figure = fv.figure_pos;
  try {
    const int rc = fill_config(cfg, fv);
    if (rc != 0) return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const bool is_figure = cfg.command == gausspt::Command::figure;
  if (is_figure && !cfg.figure_id) {
    std::cerr << "error: figure command requires --figure\n";
    return 2;
  }
  if (!is_figure && cfg.figure_id) {
    std::cerr << "error: --figure is only valid with the figure command\n";
    return 2;
  }

  return gausspt::run(cfg);
}
