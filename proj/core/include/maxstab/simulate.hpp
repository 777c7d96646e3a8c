#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "maxstab/gaussian.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/models.hpp"

namespace maxstab {

// Poisson storm process with Gaussian-density profiles, evaluated exactly on
// the site set. Storm centers are drawn on the site hull enlarged by
// `padding`; the monotone stopping rule makes the restriction to that box
// exact, and the documented truncation bound covers centers outside it.
class SmithSampler {
 public:
  SmithSampler(SmithModel model, SiteSet sites, SimulationControl control,
               const GridSpec* grid = nullptr);

  std::vector<double> sample(std::uint64_t replicate,
                             SimulationInfo* info = nullptr) const;

  double truncation_bound() const { return truncation_bound_; }
  double padding() const { return padding_; }

 private:
  SmithModel model_;
  SimulationControl control_;
  SiteSet sites_;
  Eigen::Matrix3d sigma_inv_ = Eigen::Matrix3d::Identity();
  double fmax_ = 0.0;
  double lambda_max_ = 1.0;  // largest eigenvalue of sigma
  double padding_ = 0.0;
  double box_lo_[3] = {0, 0, 0};
  double box_len_[3] = {0, 0, 0};
  double box_vol_ = 0.0;
  double truncation_bound_ = 0.0;
  bool grid_mode_ = false;
  GridSpec grid_;
};

// Spectral-threshold sampler: decreasing Poisson weights against log-Gaussian
// profiles, stopped once the weight times an empirical quantile bound of
// sup Y cannot reach the current field minimum. The bound replaces an
// almost-surely unbounded supremum, so results carry bias_possible = true.
class BrThresholdSampler {
 public:
  BrThresholdSampler(BrownResnickModel model, SiteSet sites,
                     SimulationControl control);

  std::vector<double> sample(std::uint64_t replicate,
                             SimulationInfo* info = nullptr) const;

  double bound() const { return bound_; }

 private:
  BrownResnickModel model_;
  SimulationControl control_;
  SiteSet sites_;
  std::unique_ptr<FbfSampler> fbf_;  // rooted at the site centroid
  std::vector<double> half_var_;     // gamma(x - root) / 2 per site
  double bound_ = 0.0;
};

struct DrawState;

// Exact sampler via extremal functions: for each site, spectral fields tilted
// at that site are drawn down a Poisson sequence until the running maximum is
// final there; a candidate is kept only when it stays below the already-final
// values at every earlier site. Runs in the log domain and evaluates the
// underlying Gaussian field lazily, row by row of the packed factor.
class BrExtremalSampler {
 public:
  BrExtremalSampler(BrownResnickModel model, SiteSet sites,
                    SimulationControl control, const GridSpec* grid = nullptr);

  std::vector<double> sample(std::uint64_t replicate,
                             SimulationInfo* info = nullptr) const;

 private:
  double half_gamma(std::size_t i, std::size_t k) const;
  double eval_w(std::size_t i, DrawState& s) const;

  BrownResnickModel model_;
  SimulationControl control_;
  SiteSet sites_;
  PackedCholesky factor_;  // covariance of sites 1..m-1 rooted at site 0
  bool grid_mode_ = false;
  GridSpec grid_;
  std::vector<std::array<long, 3>> cell_;       // grid coords per site
  std::vector<double> gamma_table_;             // grid: by index offset
  std::array<long, 3> table_dims_ = {1, 1, 1};
  std::vector<double> gamma_dense_;             // generic: full m*m
  std::vector<std::int32_t> near_offsets_;      // grid: packed axis offsets
  std::vector<std::int32_t> near_order_;        // generic: per-site neighbor order
};

// Model/method dispatch plus the public grid entry points.
class FieldSimulator {
 public:
  FieldSimulator(ModelVariant model, SimulationControl control, SiteSet sites,
                 const GridSpec* grid = nullptr);

  std::vector<double> sample(std::uint64_t replicate,
                             SimulationInfo* info = nullptr) const;
  const SiteSet& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  SimMethod method() const { return method_; }

 private:
  SiteSet sites_;
  SimMethod method_;
  std::variant<SmithSampler, BrThresholdSampler, BrExtremalSampler> impl_;
};

SimMethod resolve_method(const ModelVariant& model,
                         const std::optional<SimMethod>& requested);

FieldRealization sample_smith(const SmithModel& model, const GridSpec& grid,
                              const SimulationControl& control,
                              std::uint64_t replicate = 0);
FieldRealization sample_brown_resnick(const BrownResnickModel& model,
                                      const GridSpec& grid,
                                      const SimulationControl& control,
                                      std::uint64_t replicate = 0);

// ln Z: unit-Frechet margins map to standard Gumbel margins.
RealField gumbel_transform(const FieldRealization& f);

struct MarginCheck {
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;
  bool pass = false;
};

// KS distance of replicate values at one site against the unit-Frechet CDF.
MarginCheck margin_check(std::span<const double> values, double level = 0.01);

}  // namespace maxstab
