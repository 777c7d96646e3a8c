#include "maxstab/dependence.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "maxstab/errors.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

double theta_closed_form(const ModelVariant& model, const double* h, int dim) {
  if (dim < 1 || dim > 3) throw input_error("theta_closed_form: dim must be 1..3");
  double q = 0.0;
  if (const auto* sm = std::get_if<SmithModel>(&model)) {
    if (sm->dim != dim)
      throw input_error("theta_closed_form: lag dimension does not match model");
    Eigen::MatrixXd sigma(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) sigma(r, c) = sm->sigma[r * dim + c];
    Eigen::Map<const Eigen::VectorXd> hv(h, dim);
    q = hv.dot(sigma.llt().solve(hv));
  } else {
    q = std::get<BrownResnickModel>(model).variogram(h, dim);
  }
  return 2.0 * normal_cdf(0.5 * std::sqrt(std::max(q, 0.0)));
}

ThetaEstimate estimate_theta_areal(const ModelVariant& model,
                                   const SiteSet& sites,
                                   const SimulationControl& control, long n) {
  if (n < 100) throw input_error("estimate_theta_areal: need n >= 100");
  FieldSimulator sim(model, control, sites);
  const unsigned threads = resolve_threads(control.threads);

  // Per-replicate statistics land in index-addressed slots and are reduced
  // in index order, so results do not depend on the worker count.
  std::vector<double> recip(static_cast<std::size_t>(n));
  parallel_for(recip.size(), threads, [&](std::size_t r) {
    const std::vector<double> z = sim.sample(r);
    const double sup = *std::max_element(z.begin(), z.end());
    if (!(sup > 0.0))
      throw numerical_error("estimate_theta_areal: nonpositive supremum");
    recip[r] = 1.0 / sup;
  });

  NeumaierSum acc;
  for (const double a : recip) acc.add(a);
  const double mean = acc.value() / static_cast<double>(n);
  NeumaierSum sq;
  for (const double a : recip) sq.add((a - mean) * (a - mean));
  const double sd = std::sqrt(sq.value() / static_cast<double>(n - 1));

  ThetaEstimate out;
  out.value = 1.0 / mean;
  out.std_error = out.value * out.value * sd / std::sqrt(static_cast<double>(n));
  out.n_replicates = n;
  return out;
}

ThetaEstimate estimate_theta_pair(const ModelVariant& model, const double* h,
                                  int dim, const SimulationControl& control,
                                  long n, const double* anchor) {
  SiteSet s;
  s.dim = dim;
  double base[3] = {0.0, 0.0, 0.0};
  if (anchor)
    for (int k = 0; k < dim; ++k) base[k] = anchor[k];
  s.push(base);
  bool zero = true;
  for (int k = 0; k < dim; ++k) zero = zero && h[k] == 0.0;
  if (!zero) {
    double other[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) other[k] = base[k] + h[k];
    s.push(other);  // h = 0 collapses to one site: sup over {x,x} is Z(x)
  }
  return estimate_theta_areal(model, s, control, n);
}

SiteSet cube_sites(int dim, const std::array<double, 3>& lo, double side,
                   double delta) {
  if (dim < 1 || dim > 3) throw input_error("cube_sites: dim must be 1..3");
  if (!(side > 0.0) || !(delta > 0.0))
    throw input_error("cube_sites: side and delta must be positive");
  const long q = std::lround(side / delta);
  if (q < 1 || std::abs(q * delta - side) > 1e-9 * std::max(1.0, side))
    throw input_error("cube_sites: delta must divide the cube side");

  SiteSet s;
  s.dim = dim;
  const long q1 = dim > 1 ? q : 1;
  const long q2 = dim > 2 ? q : 1;
  double x[3];
  for (long i0 = 0; i0 < q; ++i0)
    for (long i1 = 0; i1 < q1; ++i1)
      for (long i2 = 0; i2 < q2; ++i2) {
        x[0] = lo[0] + (i0 + 0.5) * delta;
        x[1] = lo[1] + (i1 + 0.5) * delta;
        x[2] = lo[2] + (i2 + 0.5) * delta;
        s.push(x);
      }
  return s;
}

NuEstimate estimate_nu(const ModelVariant& model, const std::array<long, 3>& lag,
                       int dim, double delta, const SimulationControl& control,
                       long n) {
  if (n < 100) throw input_error("estimate_nu: need n >= 100");
  if (dim < 1 || dim > 3) throw input_error("estimate_nu: dim must be 1..3");
  bool zero = true;
  for (int k = 0; k < dim; ++k) zero = zero && lag[k] == 0;
  if (zero) throw input_error("estimate_nu: lag must be nonzero");
  const long q = std::lround(1.0 / delta);
  if (q < 1 || std::abs(q * delta - 1.0) > 1e-9)
    throw input_error("estimate_nu: delta must divide 1");

  const SiteSet a = cube_sites(dim, {0.0, 0.0, 0.0}, 1.0, delta);
  std::array<double, 3> blo = {0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) blo[k] = static_cast<double>(lag[k]);
  const SiteSet b = cube_sites(dim, blo, 1.0, delta);

  SiteSet both = a;
  for (std::size_t i = 0; i < b.size(); ++i) both.push(b.site(i));
  const std::size_t ma = a.size();

  FieldSimulator sim(model, control, both);
  const unsigned threads = resolve_threads(control.threads);

  const auto un = static_cast<std::size_t>(n);
  std::vector<double> ra(un), rb(un), ru(un);
  parallel_for(un, threads, [&](std::size_t r) {
    const std::vector<double> z = sim.sample(r);
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < ma; ++i) sa = std::max(sa, z[i]);
    for (std::size_t i = ma; i < z.size(); ++i) sb = std::max(sb, z[i]);
    if (!(sa > 0.0 && sb > 0.0))
      throw numerical_error("estimate_nu: nonpositive supremum");
    ra[r] = 1.0 / sa;
    rb[r] = 1.0 / sb;
    // The union supremum is the larger cube supremum, so the three
    // statistics share each replicate exactly.
    ru[r] = 1.0 / std::max(sa, sb);
  });

  const auto mean_of = [un](const std::vector<double>& v) {
    NeumaierSum s;
    for (const double x : v) s.add(x);
    return s.value() / static_cast<double>(un);
  };
  const double mean_a = mean_of(ra), mean_b = mean_of(rb), mean_u = mean_of(ru);

  // 3x3 sample covariance of the reciprocal sups, two-pass.
  double cov[3][3] = {};
  const std::vector<double>* cols[3] = {&ra, &rb, &ru};
  const double means[3] = {mean_a, mean_b, mean_u};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      NeumaierSum s;
      for (std::size_t r = 0; r < un; ++r)
        s.add(((*cols[i])[r] - means[i]) * ((*cols[j])[r] - means[j]));
      cov[i][j] = cov[j][i] = s.value() / static_cast<double>(un - 1);
    }

  NuEstimate out;
  out.lag = lag;
  double nsq = 0.0;
  double cheb = 0.0;
  for (int k = 0; k < dim; ++k) {
    nsq += static_cast<double>(lag[k]) * static_cast<double>(lag[k]);
    cheb = std::max(cheb, std::abs(static_cast<double>(lag[k])));
  }
  out.norm_euclid = std::sqrt(nsq);
  out.norm_chebyshev = cheb;
  out.theta_a = 1.0 / mean_a;
  out.theta_b = 1.0 / mean_b;
  out.theta_union = 1.0 / mean_u;
  out.value = out.theta_a + out.theta_b - out.theta_union;
  const double g[3] = {-out.theta_a * out.theta_a, -out.theta_b * out.theta_b,
                       out.theta_union * out.theta_union};
  double var = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) var += g[i] * cov[i][j] * g[j];
  out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(un));
  out.n_replicates = n;
  out.negative_raw = out.value < 0.0;
  return out;
}

DecayFit fit_decay(const std::vector<NuEstimate>& points, int dim,
                   double delta_moment) {
  if (!(delta_moment > 0.0))
    throw input_error("fit_decay: moment exponent must be positive");
  std::vector<double> lx, ly;
  double lo = 0.0, hi = 0.0;
  for (const auto& p : points) {
    if (!(p.value > 3.0 * p.std_error)) continue;
    lx.push_back(std::log(p.norm_euclid));
    ly.push_back(std::log(p.value));
    lo = lo == 0.0 ? p.norm_euclid : std::min(lo, p.norm_euclid);
    hi = std::max(hi, p.norm_euclid);
  }
  if (lx.size() < 4)
    throw input_error(
        "fit_decay: need at least 4 lags with nu above 3 standard errors");

  const LineFit fit = fit_line(lx, ly);
  DecayFit out;
  out.k_hat = std::exp(fit.intercept);
  out.b_hat = -fit.slope;
  out.b_se = fit.slope_se;
  out.r2 = fit.r2;
  out.delta_moment = delta_moment;
  out.threshold =
      dim * std::max(2.0, (2.0 + delta_moment) / delta_moment);
  out.window_lo = lo;
  out.window_hi = hi;
  out.lags_used = static_cast<long>(lx.size());
  return out;
}

NuCurve estimate_nu_curve(const ModelVariant& model,
                          const std::vector<std::array<long, 3>>& lags,
                          int dim, double delta,
                          const SimulationControl& control, long n,
                          double delta_moment) {
  if (lags.empty()) throw input_error("estimate_nu_curve: no lags");
  if (!(delta_moment > 0.0))
    throw input_error("estimate_nu_curve: moment exponent must be positive");
  NuCurve out;
  out.points.reserve(lags.size());
  for (const auto& lag : lags) {
    SimulationControl c = control;
    c.seed = derive_seed_lattice(control.seed, 2, lag[0], lag[1], lag[2]);
    out.points.push_back(estimate_nu(model, lag, dim, delta, c, n));
  }
  try {
    out.fit = fit_decay(out.points, dim, delta_moment);
  } catch (const input_error&) {
    out.fit.reset();  // too few usable lags; the curve itself still stands
  }
  return out;
}

MixingBound mixing_alpha_bound(double theta_pair,
                               const std::array<double, 3>& lag, double tol) {
  if (!(theta_pair >= 1.0 - tol && theta_pair <= 2.0 + tol))
    throw input_error("mixing_alpha_bound: theta outside [1 - tol, 2 + tol]");
  MixingBound out;
  out.lag = lag;
  const double t = std::clamp(theta_pair, 1.0, 2.0);
  out.clamped = t != theta_pair;
  out.alpha_bound = 2.0 * (2.0 - t);
  out.note = out.clamped
                 ? "2*(2-theta) with theta clamped into [1,2]"
                 : "2*(2-theta)";
  return out;
}

CzEstimate estimate_cz(const ModelVariant& model, const SiteSet& sites,
                       const SimulationControl& control, long n) {
  if (n < 100) throw input_error("estimate_cz: need n >= 100");
  FieldSimulator sim(model, control, sites);
  const unsigned threads = resolve_threads(control.threads);

  std::vector<double> vals(static_cast<std::size_t>(n));
  parallel_for(vals.size(), threads, [&](std::size_t r) {
    const std::vector<double> z = sim.sample(r);
    const double lo = *std::min_element(z.begin(), z.end());
    if (!(lo > 0.0)) throw numerical_error("estimate_cz: nonpositive field");
    vals[r] = 1.0 / lo;
  });

  NeumaierSum acc;
  for (const double v : vals) acc.add(v);
  const double mean = acc.value() / static_cast<double>(n);
  NeumaierSum sq;
  for (const double v : vals) sq.add((v - mean) * (v - mean));

  CzEstimate out;
  out.value = mean;
  out.std_error = std::sqrt(sq.value() / static_cast<double>(n - 1)) /
                  std::sqrt(static_cast<double>(n));
  out.n_replicates = n;
  return out;
}

}  // namespace maxstab
