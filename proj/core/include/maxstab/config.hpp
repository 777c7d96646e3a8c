#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "maxstab/clt.hpp"
#include "maxstab/models.hpp"
#include "maxstab/risk.hpp"

namespace maxstab {

enum class Command { simulate, theta, nu_decay, clt, risk };

Command command_from_string(const std::string& s);
std::string to_string(Command c);

// One experiment, fully resolved: defaults filled, every value validated.
// Only the sections of the active command may appear in the file; the model,
// control and (where used) grid blocks are shared.
struct ExperimentConfig {
  Command command = Command::simulate;

  ModelVariant model = SmithModel::isotropic(2, 1.0);
  int dim = 2;

  double delta = 0.25;
  double extent = 10.0;                      // simulate: grid side length
  std::array<double, 3> origin = {0.0, 0.0, 0.0};

  SimulationControl control;
  long replicates = 500;

  std::vector<double> theta_lags = {0.5, 1.0, 2.0, 4.0, 8.0};

  std::vector<std::array<long, 3>> nu_lags;  // empty = default set per dim
  double nu_delta_moment = 1.0;

  std::vector<double> clt_lengths = {10.0, 20.0, 40.0};
  CostFunctional functional = CostFunctional::deductible_log(2.718281828459045);
  CltOptions clt_options;

  RiskConfig risk;

  bool operator==(const ExperimentConfig&) const = default;
};

std::vector<std::array<long, 3>> default_nu_lags(int dim);

// Strict parser for the flat `key = value` format ('#' starts a comment).
// Unknown keys, keys of other commands, type mismatches and invariant
// violations are all collected and reported together, each with its line.
ExperimentConfig parse_config(const std::string& text, Command command);
ExperimentConfig load_config(const std::filesystem::path& path, Command command);

// Canonical form: every key of the active command with its resolved value.
// parse_config(serialize_config(c), c.command) == c.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace maxstab
