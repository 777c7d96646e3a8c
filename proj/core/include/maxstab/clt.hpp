#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxstab/grid.hpp"
#include "maxstab/models.hpp"

namespace maxstab {

// Cost functional F applied pointwise to the simulated field. The built-ins
// are non-decreasing and non-constant except `constant`, a diagnostic mode
// whose covariances vanish identically.
struct CostFunctional {
  enum class Kind { deductible_log, threshold_indicator, log_identity, constant };

  Kind kind = Kind::deductible_log;
  double param = 1.0;          // u, z0 or c depending on kind
  double moment_exponent = 1.0;

  static CostFunctional deductible_log(double u);
  static CostFunctional threshold_indicator(double z0);
  static CostFunctional log_identity();
  static CostFunctional constant(double c);

  void validate() const;
  bool monotone() const { return kind != Kind::constant; }
  std::string name() const;
  bool operator==(const CostFunctional&) const = default;

  double operator()(double z) const {
    switch (kind) {
      case Kind::deductible_log:
        return z > param ? std::log(z / param) : 0.0;
      case Kind::threshold_indicator:
        return z > param ? 1.0 : 0.0;
      case Kind::log_identity:
        return std::log(z);
      case Kind::constant:
      default:
        return param;
    }
  }
};

// E[F(Z(0))] for a unit-Frechet margin: quadrature for the deductible kind,
// closed forms otherwise.
double analytic_mean(const CostFunctional& f);

struct VanHoveSequence {
  int dim = 2;
  std::vector<Box> regions;            // [0,L]^dim, L strictly increasing
  std::vector<double> measures;
  std::vector<double> boundary_ratios; // at r = 1
};

// Measure ratio of the r-neighborhood of the boundary of [0,L]^d to L^d.
double boundary_ratio(double length, double r, int dim);

VanHoveSequence van_hove_squares(int dim, const std::vector<double>& lengths);

// (1/sqrt(lambda(V))) * sum over grid sites in V of (F(Z(x)) - mu) * delta^d.
// V must lie within the grid extent; no extrapolation.
double normalized_integral(const FieldRealization& f, const CostFunctional& F,
                           double mu, const Box& v);

struct BoundaryDecomposition {
  double inner = 0.0;            // contribution of whole unit cells inside V
  double boundary = 0.0;         // remainder; inner + boundary = total
  double inner_measure = 0.0;    // lambda(A) = number of whole unit cells
  double boundary_measure = 0.0; // lambda(V \ A)
};

// Splits the normalized integral over the union A of integer unit cells
// [h, h+1]^d wholly inside V and the boundary remainder V \ A. Requires the
// grid spacing to divide 1 so cells align.
BoundaryDecomposition decompose_boundary(const FieldRealization& f,
                                         const CostFunctional& F, double mu,
                                         const Box& v);

struct ShellDiagnostic {
  double reach = 0.0;        // outer radius (physical) or lattice ring index
  double contribution = 0.0;
  double std_error = 0.0;
  long offsets = 0;
};

struct Sigma2Estimate {
  double value = 0.0;
  double std_error = 0.0;
  double window = 0.0;       // truncation radius (integral) or window M (cubes)
  long offset_count = 0;
  long n_per_offset = 0;
  bool capped = false;       // stopped by the hard cap, not the tail rule
  std::vector<ShellDiagnostic> shells;
};

// sigma^2 = integral over R^d of Cov(F(Z(0)), F(Z(x))) dx, as a Riemann sum
// at spacing delta. Each lattice offset gets its own independently seeded
// two-site simulation; covariances use the analytic mean, so per-offset
// estimates are unbiased and their standard errors independent. The radius
// grows until three consecutive annuli each contribute less than one
// standard error (max_radius < 0), or is fixed by the caller.
Sigma2Estimate estimate_sigma2_integral(const ModelVariant& model,
                                        const CostFunctional& F, int dim,
                                        double delta, long n,
                                        const SimulationControl& control,
                                        double max_radius = -1.0);

// Lattice-sum form: sum over integer offsets h in [-M, M]^d of
// Cov(Xt(0), Xt(h)) where Xt(h) aggregates F(Z) over the unit cell [h, h+1]
// (Riemann sum at spacing delta). Same per-offset independent-simulation
// scheme; window grows by Chebyshev shells under the same tail rule.
Sigma2Estimate estimate_sigma2_cubes(const ModelVariant& model,
                                     const CostFunctional& F, int dim,
                                     double delta, long n,
                                     const SimulationControl& control,
                                     long max_window = -1);

struct NormalityStats {
  double ks_stat = 0.0;
  double ks_p = 0.0;
  double ad_stat = 0.0;
  double ad_p = 0.0;
  double skewness = 0.0;
  double ex_kurtosis = 0.0;
  long n = 0;
};

// One-sample tests of `samples` against N(mu0, sigma_sq0).
NormalityStats normality_stats(std::span<const double> samples, double mu0,
                               double sigma_sq0);

struct RegionReport {
  double length = 0.0;
  double measure = 0.0;
  long replicates = 0;
  double mean = 0.0;          // of the normalized integral
  double variance = 0.0;
  double mu_used = 0.0;       // centering constant (analytic or plug-in)
  NormalityStats normality;   // against N(0, sigma2)
  double boundary_var_ratio = 0.0;  // Var(boundary part) / Var(total)
  bool ad_pass_1pct = false;
};

struct CltOptions {
  long sigma2_n = 2000;           // replicates per covariance offset
  double sigma2_max_radius = -1.0;
  long cubes_max_window = -1;
  bool plug_in_mu = false;        // use the replicate sample mean instead of
                                  // the analytic mean (biased centring)

  bool operator==(const CltOptions&) const = default;
};

struct CltReport {
  CostFunctional functional;
  double delta = 0.0;
  double mu = 0.0;
  bool mu_plug_in = false;
  Sigma2Estimate sigma2_integral;
  Sigma2Estimate sigma2_cubes;
  std::vector<RegionReport> regions;
  bool asymptotics_reached = false;  // AD pass at the largest region
  // QQ data for the largest region: (theoretical, empirical) quantiles of
  // the standardized normalized integral.
  std::vector<std::pair<double, double>> qq;
};

CltReport clt_experiment(const ModelVariant& model, const CostFunctional& F,
                         const VanHoveSequence& seq, double delta,
                         long replicates, const SimulationControl& control,
                         const CltOptions& options = {});

}  // namespace maxstab
