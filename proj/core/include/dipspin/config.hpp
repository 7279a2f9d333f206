#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dipspin/analysis.hpp"
#include "dipspin/dynamics.hpp"
#include "dipspin/experiments.hpp"

namespace dipspin {

enum class Experiment { Fid, Echo, Pake, Scaling, Oracle };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view s);

/// Everything one invocation needs. Defaults depend on the experiment
/// (see defaults_for), and every field is validated before a run starts.
struct RunConfig {
  Experiment experiment = Experiment::Fid;

  // geometry
  std::array<int, 3> dims{10, 10, 10};
  bool periodic = true;
  int n_spins = 2;
  double theta = 0.0;
  std::vector<int> counts{2, 25, 50, 1500};

  double p_d = 0.01;
  Mode mode = Mode::RotatingSecular;
  InitialState init{};
  double t_end = 6.0;
  RunSettings run{};

  // echo
  double tau = 5.0;
  double k = 1.0;

  // analysis
  Window window = Window::None;
  int zero_pad = 4;
  double fit_t_max = 0.0;  ///< 0 fits the whole trajectory.

  // oracle sweep
  double omega_d = 0.01;
  int theta_steps = 19;

  // physical units
  double h_d_gauss = 2.5;
  double gamma = kProtonGamma;

  std::string out_dir = "out";

  void validate() const;
};

RunConfig defaults_for(Experiment e);

/// Flat "key = value" text; '#' starts a comment. The experiment key (or
/// `forced`) picks the defaults, the remaining keys are applied on top.
/// Unknown keys, repeated keys and bad values throw ConfigError naming the key.
RunConfig parse_config(std::string_view text);
RunConfig parse_config(std::string_view text, Experiment forced,
                       const std::vector<std::string>& overrides = {});

/// Applies one "key=value" pair and revalidates.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& cfg);

/// 17 significant digits, enough to read back the same double.
std::string format_double(double v);

}  // namespace dipspin
