#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kclind/correlations.hpp"
#include "kclind/model.hpp"

namespace kclind {

enum class ScenarioKind {
  Custom,         // trajectory of the configured model/initial state
  Fig1,           // concurrence vs time for a family of separable states
  Fig2,           // populations/coherences/correlations along one trajectory
  Fig4,           // driven dynamics in the collective basis
  Fig5a,          // driven correlations, |--> start
  Fig5b,          // driven correlations, |++> start
  Fig6,           // stationary concurrence vs drive/damping asymmetry
  SeparableMax,   // stationary concurrence maximized over product states
  AsymmetryScan,  // quadratic concurrence-loss law fit
  BirthTime,      // entanglement birth times across initial purities
};

struct InitialStateSpec {
  enum class Kind { Named, Bloch, RawMatrix };
  Kind kind = Kind::Named;
  std::string name = "mm";  // pp pm mp mm bell_* mixed
  BlochParams bloch_a;
  BlochParams bloch_b;
  Matrix matrix;  // RawMatrix only
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::Custom;
  TwoQubitConfig model;
  InitialStateSpec initial;

  double t_max = 10.0;
  int n_points = 1000;

  double lambda = 0.5;  // Bloch purity used by fig2-style runs
  std::vector<double> lambda_grid{1.0, 0.75, 0.5, 0.25};
  double birth_threshold = 1e-9;

  // separable_max grids
  int lambda_points = 9;
  int theta_points = 9;
  int phi_points = 8;
  double lambda_cap = 1.0;

  std::vector<double> delta_grid{0.001, 0.002, 0.004, 0.008};

  // fig6 grids
  double omega_ratio_min = 0.5;
  double omega_ratio_max = 1.5;
  int omega_ratio_points = 41;
  std::vector<double> gamma_ratios{0.5, 1.0, 2.0};

  MeasuredSide measurement_side = MeasuredSide::B;

  std::string out;
  int threads = 1;
  unsigned long seed = 0;  // reserved; everything here is deterministic
};

// Flat `key = value` lines; '#' starts a comment; blank lines ignored;
// duplicate or unknown keys are errors.
std::map<std::string, std::string> parse_key_values(std::istream& in);

ScenarioConfig parse_scenario_config(std::istream& in);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// Built-in configs behind `figure <tag>`.
ScenarioConfig default_figure_config(ScenarioKind kind);

const char* scenario_name(ScenarioKind kind);

}  // namespace kclind
