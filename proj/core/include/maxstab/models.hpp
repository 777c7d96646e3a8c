#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "maxstab/grid.hpp"
#include "maxstab/variogram.hpp"

namespace maxstab {

// Storm-profile model: unit-mean Gaussian density bumps dropped at Poisson
// locations. sigma is dim x dim row-major and must be symmetric positive
// definite (symmetry tolerance 1e-12 relative).
struct SmithModel {
  int dim = 2;
  std::vector<double> sigma;

  void validate() const;
  static SmithModel isotropic(int dim, double variance);
  bool operator==(const SmithModel&) const = default;
};

struct BrownResnickModel {
  PowerVariogram variogram;

  void validate() const { variogram.validate(); }
  bool operator==(const BrownResnickModel&) const = default;
};

using ModelVariant = std::variant<SmithModel, BrownResnickModel>;

int model_dim(const ModelVariant& m);
std::string model_tag(const ModelVariant& m);
void validate_model(const ModelVariant& m);

struct SimulationControl {
  std::uint64_t seed = 1;
  // Unset = pick the exact algorithm for the model.
  std::optional<SimMethod> method{};
  // Storm-center padding around the site hull; negative requests the default
  // 6 * sqrt(largest eigenvalue of sigma).
  double padding = -1.0;
  // Quantile of sup Y used as the stopping bound by the threshold method.
  double quantile_bound = 0.999;
  long pilot_draws = 1000;
  long max_spectral_draws = 4000000;
  unsigned threads = 0;  // 0 resolves via MAXSTAB_THREADS, then hardware

  void validate() const;
  bool operator==(const SimulationControl&) const = default;
};

// Method the CLI and estimators use when none is requested: the exact
// algorithm for each model.
SimMethod default_method(const ModelVariant& m);

}  // namespace maxstab
