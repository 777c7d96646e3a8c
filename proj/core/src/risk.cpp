#include "maxstab/risk.hpp"

#include <algorithm>
#include <cmath>

#include "maxstab/errors.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

double deductible_loss(double z, double u) {
  if (!(u > 0.0)) throw input_error("deductible level u must be positive");
  if (!(z > 0.0)) throw input_error("field value must be positive");
  return z > u ? std::log(z / u) : 0.0;
}

double expected_loss_analytic(double u) {
  return analytic_mean(CostFunctional::deductible_log(u));
}

double normalized_loss(const FieldRealization& f, double u, const Box& v) {
  if (!(u > 0.0)) throw input_error("deductible level u must be positive");
  v.validate();
  if (f.grid.dim != v.dim)
    throw input_error("region dimension does not match the grid");
  if (f.values.size() != f.grid.size())
    throw input_error("field values do not match the grid size");
  for (int k = 0; k < v.dim; ++k) {
    const double top = f.grid.origin[k] +
                       static_cast<double>(f.grid.counts[k]) * f.grid.delta;
    if (v.lo[k] < f.grid.origin[k] - 1e-9 || v.hi[k] > top + 1e-9)
      throw input_error("region extends beyond the simulated grid");
  }
  const GridSpec& g = f.grid;
  const GridWindow w = window_in_box(g, v);
  NeumaierSum acc;
  const long c1 = g.counts[1], c2 = g.counts[2];
  for (long i0 = w.lo[0]; i0 <= w.hi[0]; ++i0)
    for (long i1 = w.lo[1]; i1 <= w.hi[1]; ++i1)
      for (long i2 = w.lo[2]; i2 <= w.hi[2]; ++i2) {
        const std::size_t idx = static_cast<std::size_t>((i0 * c1 + i1) * c2 + i2);
        const double z = f.values[idx];
        acc.add(z > u ? std::log(z / u) : 0.0);
      }
  return acc.value() * g.cell_volume() / v.volume();
}

double gaussian_var_approx(double measure, double mu, double sigma2, double p) {
  if (!(measure > 0.0)) throw input_error("region measure must be positive");
  if (!(sigma2 >= 0.0)) throw input_error("sigma2 must be nonnegative");
  if (!(p > 0.0 && p < 1.0)) throw input_error("level p must lie in (0, 1)");
  return mu + normal_quantile(p) * std::sqrt(sigma2 / measure);
}

void RiskConfig::validate() const {
  if (!(u > 0.0) || !std::isfinite(u))
    throw input_error("deductible level u must be positive");
  if (levels.empty()) throw input_error("need at least one risk level");
  for (double p : levels)
    if (!(p > 0.0 && p < 1.0)) throw input_error("risk levels must lie in (0, 1)");
  if (lengths.empty()) throw input_error("need at least one region length");
  double prev = 0.0;
  for (double len : lengths) {
    if (!(len > prev))
      throw input_error("region lengths must be positive and strictly increasing");
    prev = len;
  }
  if (replicates < 100) throw input_error("need at least 100 replicates per region");
  if (sigma2_n < 100)
    throw input_error("need at least 100 replicates per covariance offset");
}

RiskReport risk_experiment(const ModelVariant& model, int dim, double delta,
                           const RiskConfig& config,
                           const SimulationControl& control) {
  config.validate();
  validate_model(model);
  control.validate();
  if (dim < 1 || dim > 3) throw input_error("dimension must be 1, 2 or 3");
  const int md = model_dim(model);
  if (md > 0 && md != dim) throw input_error("model dimension mismatch");
  if (!(delta > 0.0)) throw input_error("delta must be positive");

  const CostFunctional F = CostFunctional::deductible_log(config.u);

  RiskReport rep;
  rep.u = config.u;
  rep.dim = dim;
  rep.delta = delta;
  rep.synthetic = config.synthetic_null;
  rep.mu = analytic_mean(F);
  rep.sigma2 = estimate_sigma2_integral(model, F, dim, delta, config.sigma2_n,
                                        control, config.sigma2_max_radius);
  if (!(rep.sigma2.value > 0.0))
    throw numerical_error(
        "sigma2 estimate is not positive; increase the per-offset replicates");

  const std::size_t nrep = static_cast<std::size_t>(config.replicates);
  for (std::size_t ri = 0; ri < config.lengths.size(); ++ri) {
    const double len = config.lengths[ri];
    const Box v = Box::cube(dim, len);
    const double measure = v.volume();

    std::vector<double> losses(nrep);
    if (config.synthetic_null) {
      // Reference draws straight from the limiting law; one stream per region.
      RngStream g(control.seed, stream_id(StreamPurpose::synthetic, ri));
      const double sd = std::sqrt(rep.sigma2.value / measure);
      for (std::size_t r = 0; r < nrep; ++r)
        losses[r] = rep.mu + sd * g.normal();
    } else {
      GridSpec grid;
      grid.dim = dim;
      grid.delta = delta;
      for (int k = 0; k < dim; ++k) {
        const long cnt = std::lround(len / delta);
        if (cnt < 1 || std::abs(static_cast<double>(cnt) * delta - len) >
                           1e-9 * std::max(1.0, len))
          throw input_error("delta must divide every region side");
        grid.counts[k] = cnt;
      }
      grid.validate();
      SimulationControl rc = control;
      rc.seed = derive_seed_lattice(control.seed, 3, static_cast<long>(ri), 0, 0);
      const FieldSimulator sim(model, rc, grid.sites(), &grid);
      parallel_for(nrep, control.threads, [&](std::size_t r) {
        FieldRealization f;
        f.grid = grid;
        f.values = sim.sample(r);
        f.seed = rc.seed;
        f.replicate = r;
        losses[r] = normalized_loss(f, config.u, v);
      });
    }

    RegionRisk region;
    region.length = len;
    region.measure = measure;
    region.replicates = config.replicates;
    NeumaierSum s;
    for (double x : losses) s.add(x);
    region.mean_loss = s.value() / static_cast<double>(nrep);
    NeumaierSum q;
    for (double x : losses) {
      const double d = x - region.mean_loss;
      q.add(d * d);
    }
    region.var_loss = nrep > 1 ? q.value() / static_cast<double>(nrep - 1) : 0.0;

    std::vector<double> sorted(losses);
    std::sort(sorted.begin(), sorted.end());
    for (double p : config.levels) {
      LevelRow row;
      row.level = p;
      row.var_empirical = empirical_quantile(sorted, p);
      row.var_gaussian = gaussian_var_approx(measure, rep.mu, rep.sigma2.value, p);
      const std::size_t k = static_cast<std::size_t>(
          std::ceil((1.0 - p) * static_cast<double>(nrep)));
      NeumaierSum tail;
      for (std::size_t i = nrep - std::max<std::size_t>(k, 1); i < nrep; ++i)
        tail.add(sorted[i]);
      row.es_empirical = tail.value() / static_cast<double>(std::max<std::size_t>(k, 1));
      region.levels.push_back(row);
    }
    rep.regions.push_back(region);
  }
  rep.mu_hat = rep.regions.back().mean_loss;

  // Scale homogeneity: under the limiting law VaR_p - mu halves in log
  // measure, slope -1/2.
  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    HomogeneitySlope hs;
    hs.level = config.levels[li];
    std::vector<double> lx, ly;
    for (const RegionRisk& region : rep.regions) {
      const double dev = region.levels[li].var_empirical - rep.mu;
      if (dev > 0.0) {
        lx.push_back(std::log(region.measure));
        ly.push_back(std::log(dev));
      }
    }
    hs.points = static_cast<long>(lx.size());
    if (lx.size() >= 2) {
      const LineFit fit = fit_line(lx, ly);
      hs.slope = fit.slope;
      hs.se = fit.slope_se;
      hs.r2 = fit.r2;
      hs.degenerate = false;
    }
    rep.slopes.push_back(hs);
  }
  return rep;
}

}  // namespace maxstab
