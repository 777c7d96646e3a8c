#pragma once

#include <vector>

#include "maxstab/clt.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/models.hpp"

namespace maxstab {

// Claim size ln(z/u) above the deductible u, zero at or below it.
double deductible_loss(double z, double u);

// E[deductible loss] at a single site with a unit-Frechet margin.
double expected_loss_analytic(double u);

// Region-averaged loss (1/lambda(V)) * sum over sites in V of F(Z(x)) delta^d
// with F the deductible claim size. When V is a union of whole grid cells this
// equals mu + normalized_integral(...) / sqrt(lambda(V)) exactly, because the
// site count times delta^d reproduces lambda(V).
double normalized_loss(const FieldRealization& f, double u, const Box& v);

// Limiting Gaussian approximation to the level-p value at risk of the
// normalized loss: mu + z_p * sqrt(sigma2 / measure).
double gaussian_var_approx(double measure, double mu, double sigma2, double p);

struct RiskConfig {
  double u = 2.718281828459045;        // deductible level
  std::vector<double> levels = {0.9, 0.95, 0.99};
  std::vector<double> lengths = {10.0, 20.0, 40.0};  // region side lengths
  long replicates = 500;
  bool synthetic_null = false;  // draw losses from the limiting Gaussian
                                // instead of simulating fields
  long sigma2_n = 2000;         // per-offset replicates for sigma2
  double sigma2_max_radius = -1.0;

  void validate() const;
  bool operator==(const RiskConfig&) const = default;
};

struct LevelRow {
  double level = 0.0;
  double var_empirical = 0.0;  // type-7 quantile of the simulated losses
  double var_gaussian = 0.0;   // limiting approximation
  double es_empirical = 0.0;   // mean of the ceil((1-p) n) largest losses
};

struct RegionRisk {
  double length = 0.0;
  double measure = 0.0;
  long replicates = 0;
  double mean_loss = 0.0;
  double var_loss = 0.0;
  std::vector<LevelRow> levels;
};

// Least-squares slope of ln(VaR_p - mu) against ln lambda(V) across regions.
// Regions whose empirical VaR does not exceed mu are excluded; with fewer
// than two usable points the slope is reported degenerate.
struct HomogeneitySlope {
  double level = 0.0;
  double slope = 0.0;
  double se = 0.0;
  double r2 = 0.0;
  long points = 0;
  bool degenerate = true;
};

struct RiskReport {
  double u = 0.0;
  int dim = 0;
  double delta = 0.0;
  bool synthetic = false;
  double mu = 0.0;      // analytic expected loss
  double mu_hat = 0.0;  // mean simulated loss at the largest region
  Sigma2Estimate sigma2;
  std::vector<RegionRisk> regions;
  std::vector<HomogeneitySlope> slopes;
};

RiskReport risk_experiment(const ModelVariant& model, int dim, double delta,
                           const RiskConfig& config,
                           const SimulationControl& control);

}  // namespace maxstab
