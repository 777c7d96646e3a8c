#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "maxstab/models.hpp"

namespace maxstab {

// Pairwise extremal coefficient at lag h: 2*Phi(sqrt(h' Sigma^-1 h)/2) for
// the Smith model, 2*Phi(sqrt(eta*|h|^alpha)/2) for Brown-Resnick.
double theta_closed_form(const ModelVariant& model, const double* h, int dim);

struct ThetaEstimate {
  double value = 1.0;
  double std_error = 0.0;
  long n_replicates = 0;
};

// theta(S) from n independent field replicates on S: P(sup_S Z <= z) =
// exp(-theta/z), so 1/sup_S Z is exponential with rate theta and the MLE is
// n / sum of reciprocal sups.
ThetaEstimate estimate_theta_areal(const ModelVariant& model,
                                   const SiteSet& sites,
                                   const SimulationControl& control, long n);

// Convenience for S = {anchor, anchor + h}; anchor defaults to the origin.
ThetaEstimate estimate_theta_pair(const ModelVariant& model, const double* h,
                                  int dim, const SimulationControl& control,
                                  long n, const double* anchor = nullptr);

struct NuEstimate {
  std::array<long, 3> lag = {0, 0, 0};
  double norm_euclid = 0.0;
  double norm_chebyshev = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double theta_a = 0.0;
  double theta_b = 0.0;
  double theta_union = 0.0;
  long n_replicates = 0;
  bool negative_raw = false;  // MC noise pushed the estimate below zero
};

// nu(h) = theta(A) + theta(B) - theta(A u B) for the unit cube A = [0,1]^d
// and its translate B = A + h, all three sup statistics taken from the same
// replicates on the union site set. Cubes are discretized at spacing delta
// (midpoints; delta must divide 1).
NuEstimate estimate_nu(const ModelVariant& model, const std::array<long, 3>& lag,
                       int dim, double delta, const SimulationControl& control,
                       long n);

struct DecayFit {
  double k_hat = 0.0;       // exp(intercept) of the log-log fit
  double b_hat = 0.0;       // minus the slope
  double b_se = 0.0;
  double r2 = 0.0;
  double threshold = 0.0;   // dim * max(2, (2+delta)/delta)
  double delta_moment = 1.0;
  double window_lo = 0.0;   // Euclidean lag range actually fitted
  double window_hi = 0.0;
  long lags_used = 0;
};

// Least squares of ln(nu) on ln|h| over lags with nu > 3 SE; at least four
// such lags are required.
DecayFit fit_decay(const std::vector<NuEstimate>& points, int dim,
                   double delta_moment);

struct NuCurve {
  std::vector<NuEstimate> points;
  std::optional<DecayFit> fit;  // absent when too few lags rise above noise
};

NuCurve estimate_nu_curve(const ModelVariant& model,
                          const std::vector<std::array<long, 3>>& lags,
                          int dim, double delta,
                          const SimulationControl& control, long n,
                          double delta_moment);

struct MixingBound {
  std::array<double, 3> lag = {0, 0, 0};
  double alpha_bound = 0.0;
  bool clamped = false;
  std::string note;
};

// Upper bound 2*(2 - theta({0,h})) on the alpha-mixing coefficient between
// the sigma-fields at 0 and h. theta slightly outside [1,2] from MC noise is
// clamped; beyond `tol` it is rejected.
MixingBound mixing_alpha_bound(double theta_pair,
                               const std::array<double, 3>& lag = {0, 0, 0},
                               double tol = 0.1);

struct CzEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_replicates = 0;
};

// C(S) = E[sup_S 1/Z] = E[1 / inf_S Z], by plain Monte Carlo.
CzEstimate estimate_cz(const ModelVariant& model, const SiteSet& sites,
                       const SimulationControl& control, long n);

// Midpoint discretization of the cube [lo, lo+side]^dim at spacing delta.
SiteSet cube_sites(int dim, const std::array<double, 3>& lo, double side,
                   double delta);

}  // namespace maxstab
