#include "maxstab/clt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "maxstab/dependence.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/quadrature.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

void require_dim(int dim) {
  if (dim < 1 || dim > 3) throw input_error("dimension must be 1, 2 or 3");
}

// Unit cells only align with the site lattice when delta divides 1.
long units_per_cell(double delta) {
  if (!(delta > 0.0)) throw input_error("delta must be positive");
  const long q = std::lround(1.0 / delta);
  if (q < 1 || std::abs(static_cast<double>(q) * delta - 1.0) > 1e-9)
    throw input_error("delta must divide 1 so unit cells align with the site lattice");
  return q;
}

struct Offset {
  long k[3] = {0, 0, 0};
  double w = 1.0;  // 2 for half-space representatives, 1 for the origin
};

bool lex_positive(const long* k, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (k[i] > 0) return true;
    if (k[i] < 0) return false;
  }
  return false;
}

// Integers t with lo2 < t^2 <= hi2, symmetric about zero.
void axis_values(long lo2, long hi2, std::vector<long>& out) {
  out.clear();
  if (hi2 < 0 || hi2 <= lo2) return;
  long tmin = 0;
  if (lo2 >= 0) {
    tmin = static_cast<long>(std::sqrt(static_cast<double>(lo2)));
    while (tmin * tmin > lo2) --tmin;
    while (tmin * tmin <= lo2) ++tmin;
  }
  long tmax = static_cast<long>(std::sqrt(static_cast<double>(hi2)));
  while (tmax * tmax > hi2) --tmax;
  while ((tmax + 1) * (tmax + 1) <= hi2) ++tmax;
  for (long t = tmin; t <= tmax; ++t) {
    out.push_back(t);
    if (t > 0) out.push_back(-t);
  }
}

// Half-space representatives of the Euclidean annulus j-1 < |k| <= j.
std::vector<Offset> euclid_ring(int dim, long j) {
  std::vector<Offset> out;
  if (j == 0) {
    out.push_back({});
    return out;
  }
  const long lo2 = (j - 1) * (j - 1);
  const long hi2 = j * j;
  auto push = [&](long a, long b, long c) {
    long k[3] = {a, b, c};
    if (!lex_positive(k, dim)) return;
    out.push_back({{a, b, c}, 2.0});
  };
  std::vector<long> ts;
  if (dim == 1) {
    push(j, 0, 0);
  } else if (dim == 2) {
    for (long a = -j; a <= j; ++a) {
      axis_values(lo2 - a * a, hi2 - a * a, ts);
      for (long b : ts) push(a, b, 0);
    }
  } else {
    for (long a = -j; a <= j; ++a) {
      for (long b = -j; b <= j; ++b) {
        const long r = a * a + b * b;
        if (r > hi2) continue;
        axis_values(lo2 - r, hi2 - r, ts);
        for (long c : ts) push(a, b, c);
      }
    }
  }
  return out;
}

// Half-space representatives of the Chebyshev shell |h|_inf == s.
std::vector<Offset> cheb_ring(int dim, long s) {
  std::vector<Offset> out;
  if (s == 0) {
    out.push_back({});
    return out;
  }
  const long b1 = dim > 1 ? s : 0;
  const long b2 = dim > 2 ? s : 0;
  for (long a = -s; a <= s; ++a) {
    for (long b = -b1; b <= b1; ++b) {
      for (long c = -b2; c <= b2; ++c) {
        if (std::max({std::labs(a), std::labs(b), std::labs(c)}) != s) continue;
        long k[3] = {a, b, c};
        if (!lex_positive(k, dim)) continue;
        out.push_back({{a, b, c}, 2.0});
      }
    }
  }
  return out;
}

struct OffsetStat {
  double mean = 0.0;
  double var = 0.0;  // unbiased sample variance of the products
};

OffsetStat product_stats(const std::vector<double>& p) {
  const std::size_t n = p.size();
  NeumaierSum s;
  for (double x : p) s.add(x);
  const double mean = s.value() / static_cast<double>(n);
  NeumaierSum q;
  for (double x : p) q.add((x - mean) * (x - mean));
  OffsetStat out;
  out.mean = mean;
  out.var = q.value() / static_cast<double>(n - 1);
  return out;
}

// Covariance of F(Z) between the origin and offset*delta (or the variance at
// the origin when the offset is zero), from one dedicated two-site simulation.
OffsetStat pair_covariance(const ModelVariant& model, const CostFunctional& F,
                           double mu, int dim, double delta, const Offset& o,
                           long n, const SimulationControl& control) {
  SiteSet sites;
  sites.dim = dim;
  const double zero[3] = {0.0, 0.0, 0.0};
  sites.push(zero);
  const bool is_origin = o.k[0] == 0 && o.k[1] == 0 && o.k[2] == 0;
  if (!is_origin) {
    double x[3] = {0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) x[i] = static_cast<double>(o.k[i]) * delta;
    sites.push(x);
  }
  SimulationControl c = control;
  c.seed = derive_seed_lattice(control.seed, 0, o.k[0], o.k[1], o.k[2]);
  c.threads = 1;
  FieldSimulator sim(model, c, sites);
  std::vector<double> prods(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    const auto z = sim.sample(static_cast<std::uint64_t>(r));
    const double a = F(z[0]) - mu;
    const double b = is_origin ? a : F(z[1]) - mu;
    prods[static_cast<std::size_t>(r)] = a * b;
  }
  return product_stats(prods);
}

// Covariance of the unit-cell aggregates Xt(0) and Xt(h); E[Xt] = mu exactly
// because delta divides 1.
OffsetStat cube_covariance(const ModelVariant& model, const CostFunctional& F,
                           double mu, int dim, double delta, const Offset& o,
                           long n, const SimulationControl& control) {
  const SiteSet base = cube_sites(dim, {0.0, 0.0, 0.0}, 1.0, delta);
  const std::size_t mc = base.size();
  SiteSet sites = base;
  const bool is_origin = o.k[0] == 0 && o.k[1] == 0 && o.k[2] == 0;
  if (!is_origin) {
    double x[3];
    for (std::size_t i = 0; i < mc; ++i) {
      const double* p = base.site(i);
      for (int a = 0; a < dim; ++a) x[a] = p[a] + static_cast<double>(o.k[a]);
      sites.push(x);
    }
  }
  SimulationControl c = control;
  c.seed = derive_seed_lattice(control.seed, 1, o.k[0], o.k[1], o.k[2]);
  c.threads = 1;
  FieldSimulator sim(model, c, sites);
  double cellv = 1.0;
  for (int a = 0; a < dim; ++a) cellv *= delta;
  std::vector<double> prods(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    const auto z = sim.sample(static_cast<std::uint64_t>(r));
    NeumaierSum sa, sb;
    for (std::size_t i = 0; i < mc; ++i) sa.add(F(z[i]));
    const double da = sa.value() * cellv - mu;
    double db = da;
    if (!is_origin) {
      for (std::size_t i = mc; i < 2 * mc; ++i) sb.add(F(z[i]));
      db = sb.value() * cellv - mu;
    }
    prods[static_cast<std::size_t>(r)] = da * db;
  }
  return product_stats(prods);
}

// Shared shell driver. Rings are processed in order; in auto mode the loop
// stops once three consecutive shells each contribute less than one standard
// error. Every computed shell enters the estimate either way.
template <class RingFn, class WorkFn>
Sigma2Estimate accumulate_shells(long ring_cap, bool auto_stop, double reach_unit,
                                 double scale, long n, unsigned threads,
                                 const RingFn& ring, const WorkFn& work) {
  Sigma2Estimate out;
  out.n_per_offset = n;
  NeumaierSum total;
  double var_total = 0.0;
  int streak = 0;
  for (long s = 0; s <= ring_cap; ++s) {
    const std::vector<Offset> offs = ring(s);
    if (offs.empty()) continue;
    std::vector<OffsetStat> stats(offs.size());
    parallel_for(offs.size(), threads,
                 [&](std::size_t i) { stats[i] = work(offs[i]); });
    NeumaierSum c;
    double v = 0.0;
    for (std::size_t i = 0; i < offs.size(); ++i) {
      c.add(offs[i].w * stats[i].mean);
      v += offs[i].w * offs[i].w * stats[i].var / static_cast<double>(n);
    }
    const double contrib = scale * c.value();
    const double se = scale * std::sqrt(v);
    out.shells.push_back({static_cast<double>(s) * reach_unit, contrib, se,
                          static_cast<long>(offs.size())});
    total.add(contrib);
    var_total += se * se;
    out.offset_count += static_cast<long>(offs.size());
    out.window = static_cast<double>(s) * reach_unit;
    if (s >= 1) streak = std::abs(contrib) < se ? streak + 1 : 0;
    if (auto_stop && streak >= 3) break;
  }
  // Set whenever the window closed while the outermost shells were still
  // above noise, whether the cap was automatic or caller-pinned.
  out.capped = streak < 3;
  out.value = total.value();
  out.std_error = std::sqrt(var_total);
  return out;
}

void check_consistency(const Sigma2Estimate& e, const CostFunctional& F) {
  if (F.monotone() && e.value < -3.0 * e.std_error) {
    std::ostringstream os;
    os << "sigma2 estimate " << e.value << " is negative beyond three standard errors ("
       << e.std_error << "); estimator inconsistent";
    throw numerical_error(os.str());
  }
}

void mean_and_var(const std::vector<double>& x, double& mean, double& var) {
  const std::size_t n = x.size();
  NeumaierSum s;
  for (double v : x) s.add(v);
  mean = s.value() / static_cast<double>(n);
  NeumaierSum q;
  for (double v : x) q.add((v - mean) * (v - mean));
  var = n > 1 ? q.value() / static_cast<double>(n - 1) : 0.0;
}

}  // namespace

CostFunctional CostFunctional::deductible_log(double u) {
  CostFunctional f;
  f.kind = Kind::deductible_log;
  f.param = u;
  f.validate();
  return f;
}

CostFunctional CostFunctional::threshold_indicator(double z0) {
  CostFunctional f;
  f.kind = Kind::threshold_indicator;
  f.param = z0;
  f.validate();
  return f;
}

CostFunctional CostFunctional::log_identity() {
  CostFunctional f;
  f.kind = Kind::log_identity;
  f.param = 0.0;
  return f;
}

CostFunctional CostFunctional::constant(double c) {
  CostFunctional f;
  f.kind = Kind::constant;
  f.param = c;
  f.validate();
  return f;
}

void CostFunctional::validate() const {
  if (!std::isfinite(param)) throw input_error("functional parameter must be finite");
  if (kind == Kind::deductible_log && !(param > 0.0))
    throw input_error("deductible level u must be positive");
  if (kind == Kind::threshold_indicator && !(param > 0.0))
    throw input_error("threshold level z0 must be positive");
  if (!(moment_exponent > 0.0) || !std::isfinite(moment_exponent))
    throw input_error("moment exponent must be positive");
}

std::string CostFunctional::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::deductible_log:
      os << "deductible_log(u=" << param << ")";
      break;
    case Kind::threshold_indicator:
      os << "threshold_indicator(z0=" << param << ")";
      break;
    case Kind::log_identity:
      os << "log_identity";
      break;
    case Kind::constant:
      os << "constant(" << param << ")";
      break;
  }
  return os.str();
}

double analytic_mean(const CostFunctional& f) {
  f.validate();
  switch (f.kind) {
    case CostFunctional::Kind::deductible_log: {
      // E[ln(Z/u)]^+ for unit-Frechet Z equals int_0^{1/u} -ln(ut) e^{-t} dt;
      // the substitution t = s^2 removes the logarithmic singularity.
      const double u = f.param;
      const auto g = [u](double s) {
        if (s == 0.0) return 0.0;
        return -2.0 * s * std::log(u * s * s) * std::exp(-s * s);
      };
      const double tol = 1e-12 * (1.0 + std::abs(std::log(u)));
      return adaptive_simpson(g, 0.0, std::sqrt(1.0 / u), tol);
    }
    case CostFunctional::Kind::threshold_indicator:
      return -std::expm1(-1.0 / f.param);
    case CostFunctional::Kind::log_identity:
      return kEulerGamma;  // Gumbel mean
    case CostFunctional::Kind::constant:
    default:
      return f.param;
  }
}

double boundary_ratio(double length, double r, int dim) {
  require_dim(dim);
  if (!(length > 0.0)) throw input_error("region length must be positive");
  if (!(r >= 0.0)) throw input_error("neighborhood radius must be nonnegative");
  const double outer = std::pow(length + 2.0 * r, dim);
  const double inner = std::pow(std::max(length - 2.0 * r, 0.0), dim);
  return (outer - inner) / std::pow(length, dim);
}

VanHoveSequence van_hove_squares(int dim, const std::vector<double>& lengths) {
  require_dim(dim);
  if (lengths.empty()) throw input_error("need at least one region length");
  VanHoveSequence seq;
  seq.dim = dim;
  double prev = 0.0;
  for (double len : lengths) {
    if (!(len > prev))
      throw input_error("region lengths must be positive and strictly increasing");
    prev = len;
    seq.regions.push_back(Box::cube(dim, len));
    seq.measures.push_back(std::pow(len, dim));
    seq.boundary_ratios.push_back(boundary_ratio(len, 1.0, dim));
  }
  return seq;
}

namespace {

void check_region(const FieldRealization& f, const Box& v) {
  v.validate();
  if (f.grid.dim != v.dim)
    throw input_error("region dimension does not match the grid");
  if (f.values.size() != f.grid.size())
    throw input_error("field values do not match the grid size");
  for (int k = 0; k < v.dim; ++k) {
    const double top =
        f.grid.origin[k] + static_cast<double>(f.grid.counts[k]) * f.grid.delta;
    if (v.lo[k] < f.grid.origin[k] - 1e-9 || v.hi[k] > top + 1e-9)
      throw input_error("region extends beyond the simulated grid");
  }
}

}  // namespace

double normalized_integral(const FieldRealization& f, const CostFunctional& F,
                           double mu, const Box& v) {
  check_region(f, v);
  const GridSpec& g = f.grid;
  const GridWindow w = window_in_box(g, v);
  NeumaierSum acc;
  const long c1 = g.counts[1], c2 = g.counts[2];
  for (long i0 = w.lo[0]; i0 <= w.hi[0]; ++i0)
    for (long i1 = w.lo[1]; i1 <= w.hi[1]; ++i1)
      for (long i2 = w.lo[2]; i2 <= w.hi[2]; ++i2) {
        const std::size_t idx = static_cast<std::size_t>((i0 * c1 + i1) * c2 + i2);
        acc.add(F(f.values[idx]) - mu);
      }
  return acc.value() * g.cell_volume() / std::sqrt(v.volume());
}

BoundaryDecomposition decompose_boundary(const FieldRealization& f,
                                         const CostFunctional& F, double mu,
                                         const Box& v) {
  check_region(f, v);
  (void)units_per_cell(f.grid.delta);
  const GridSpec& g = f.grid;
  const GridWindow w = window_in_box(g, v);

  // Integer unit cells [h, h+1]^d wholly inside V.
  long hlo[3] = {0, 0, 0}, hhi[3] = {-1, -1, -1};
  double inner_measure = 1.0;
  for (int k = 0; k < g.dim; ++k) {
    hlo[k] = static_cast<long>(std::ceil(v.lo[k] - 1e-9));
    hhi[k] = static_cast<long>(std::floor(v.hi[k] + 1e-9)) - 1;
    inner_measure *= static_cast<double>(std::max(0L, hhi[k] - hlo[k] + 1));
  }

  NeumaierSum inner, boundary;
  const long c1 = g.counts[1], c2 = g.counts[2];
  double x[3];
  for (long i0 = w.lo[0]; i0 <= w.hi[0]; ++i0) {
    x[0] = g.origin[0] + (static_cast<double>(i0) + 0.5) * g.delta;
    for (long i1 = w.lo[1]; i1 <= w.hi[1]; ++i1) {
      x[1] = g.origin[1] + (static_cast<double>(i1) + 0.5) * g.delta;
      for (long i2 = w.lo[2]; i2 <= w.hi[2]; ++i2) {
        x[2] = g.origin[2] + (static_cast<double>(i2) + 0.5) * g.delta;
        bool in_core = true;
        for (int k = 0; k < g.dim; ++k) {
          const long cell = static_cast<long>(std::floor(x[k]));
          if (cell < hlo[k] || cell > hhi[k]) {
            in_core = false;
            break;
          }
        }
        const std::size_t idx = static_cast<std::size_t>((i0 * c1 + i1) * c2 + i2);
        const double term = F(f.values[idx]) - mu;
        if (in_core)
          inner.add(term);
        else
          boundary.add(term);
      }
    }
  }
  const double scale = g.cell_volume() / std::sqrt(v.volume());
  BoundaryDecomposition out;
  out.inner = inner.value() * scale;
  out.boundary = boundary.value() * scale;
  out.inner_measure = inner_measure;
  out.boundary_measure = std::max(0.0, v.volume() - inner_measure);
  return out;
}

Sigma2Estimate estimate_sigma2_integral(const ModelVariant& model,
                                        const CostFunctional& F, int dim,
                                        double delta, long n,
                                        const SimulationControl& control,
                                        double max_radius) {
  require_dim(dim);
  F.validate();
  validate_model(model);
  control.validate();
  if (!(delta > 0.0)) throw input_error("delta must be positive");
  if (n < 100) throw input_error("need at least 100 replicates per offset");
  const int md = model_dim(model);
  if (md > 0 && md != dim) throw input_error("model dimension mismatch");

  const double mu = analytic_mean(F);
  const bool auto_stop = max_radius < 0.0;
  const double cap_physical = auto_stop ? 64.0 : max_radius;
  const long ring_cap =
      std::max(0L, static_cast<long>(std::floor(cap_physical / delta + 1e-9)));
  double scale = 1.0;
  for (int k = 0; k < dim; ++k) scale *= delta;

  Sigma2Estimate out = accumulate_shells(
      ring_cap, auto_stop, delta, scale, n, control.threads,
      [dim](long j) { return euclid_ring(dim, j); },
      [&](const Offset& o) {
        return pair_covariance(model, F, mu, dim, delta, o, n, control);
      });
  check_consistency(out, F);
  return out;
}

Sigma2Estimate estimate_sigma2_cubes(const ModelVariant& model,
                                     const CostFunctional& F, int dim,
                                     double delta, long n,
                                     const SimulationControl& control,
                                     long max_window) {
  require_dim(dim);
  F.validate();
  validate_model(model);
  control.validate();
  (void)units_per_cell(delta);
  if (n < 100) throw input_error("need at least 100 replicates per offset");
  const int md = model_dim(model);
  if (md > 0 && md != dim) throw input_error("model dimension mismatch");

  const double mu = analytic_mean(F);
  const bool auto_stop = max_window < 0;
  const long ring_cap = auto_stop ? 64 : max_window;

  Sigma2Estimate out = accumulate_shells(
      ring_cap, auto_stop, 1.0, 1.0, n, control.threads,
      [dim](long s) { return cheb_ring(dim, s); },
      [&](const Offset& o) {
        return cube_covariance(model, F, mu, dim, delta, o, n, control);
      });
  check_consistency(out, F);
  return out;
}

NormalityStats normality_stats(std::span<const double> samples, double mu0,
                               double sigma_sq0) {
  if (samples.size() < 20)
    throw input_error("normality_stats: need at least 20 samples");
  if (!(sigma_sq0 > 0.0) || !std::isfinite(sigma_sq0))
    throw input_error("normality_stats: reference variance must be positive");
  const double sd = std::sqrt(sigma_sq0);
  std::vector<double> t(samples.size()), u(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t[i] = (samples[i] - mu0) / sd;
    u[i] = normal_cdf(t[i]);
  }
  NormalityStats out;
  out.n = static_cast<long>(samples.size());
  const GofTest ks = kolmogorov_smirnov(u);
  const GofTest ad = anderson_darling(u);
  out.ks_stat = ks.statistic;
  out.ks_p = ks.p_value;
  out.ad_stat = ad.statistic;
  out.ad_p = ad.p_value;
  const Moments m = sample_moments(t);
  out.skewness = m.skewness;
  out.ex_kurtosis = m.ex_kurtosis;
  return out;
}

CltReport clt_experiment(const ModelVariant& model, const CostFunctional& F,
                         const VanHoveSequence& seq, double delta,
                         long replicates, const SimulationControl& control,
                         const CltOptions& options) {
  F.validate();
  validate_model(model);
  control.validate();
  require_dim(seq.dim);
  if (seq.regions.empty()) throw input_error("the region sequence is empty");
  const int md = model_dim(model);
  if (md > 0 && md != seq.dim) throw input_error("model dimension mismatch");
  if (replicates < 200)
    throw input_error("need at least 200 replicates per region");
  if (!F.monotone())
    throw input_error("a constant functional has zero variance; nothing to test");
  (void)units_per_cell(delta);

  CltReport rep;
  rep.functional = F;
  rep.delta = delta;
  rep.mu = analytic_mean(F);
  rep.mu_plug_in = options.plug_in_mu;
  rep.sigma2_integral = estimate_sigma2_integral(
      model, F, seq.dim, delta, options.sigma2_n, control, options.sigma2_max_radius);
  rep.sigma2_cubes = estimate_sigma2_cubes(model, F, seq.dim, delta,
                                           options.sigma2_n, control,
                                           options.cubes_max_window);
  if (!(rep.sigma2_integral.value > 0.0))
    throw numerical_error(
        "sigma2 estimate is not positive; increase the per-offset replicates");

  const std::size_t nrep = static_cast<std::size_t>(replicates);
  for (std::size_t ri = 0; ri < seq.regions.size(); ++ri) {
    const Box& v = seq.regions[ri];
    v.validate();
    if (v.dim != seq.dim) throw input_error("region dimension mismatch");

    GridSpec g;
    g.dim = seq.dim;
    g.delta = delta;
    for (int k = 0; k < seq.dim; ++k) {
      const double side = v.hi[k] - v.lo[k];
      const long cnt = std::lround(side / delta);
      if (cnt < 1 ||
          std::abs(static_cast<double>(cnt) * delta - side) > 1e-9 * std::max(1.0, side))
        throw input_error("delta must divide every region side");
      g.origin[k] = v.lo[k];
      g.counts[k] = cnt;
    }
    g.validate();

    SimulationControl rc = control;
    rc.seed = derive_seed_lattice(control.seed, 3, static_cast<long>(ri), 0, 0);
    const FieldSimulator sim(model, rc, g.sites(), &g);

    double mu_used = rep.mu;
    if (options.plug_in_mu) {
      std::vector<double> sums(nrep);
      parallel_for(nrep, control.threads, [&](std::size_t r) {
        const auto z = sim.sample(r);
        NeumaierSum a;
        for (double zi : z) a.add(F(zi));
        sums[r] = a.value();
      });
      NeumaierSum tot;
      for (double s : sums) tot.add(s);
      mu_used = tot.value() /
                (static_cast<double>(nrep) * static_cast<double>(g.size()));
    }

    std::vector<double> ni(nrep), i2(nrep);
    parallel_for(nrep, control.threads, [&](std::size_t r) {
      FieldRealization f;
      f.grid = g;
      f.values = sim.sample(r);
      f.seed = rc.seed;
      f.replicate = r;
      ni[r] = normalized_integral(f, F, mu_used, v);
      i2[r] = decompose_boundary(f, F, mu_used, v).boundary;
    });

    RegionReport rr;
    rr.length = v.hi[0] - v.lo[0];
    rr.measure = v.volume();
    rr.replicates = replicates;
    rr.mu_used = mu_used;
    double var_i2 = 0.0, mean_i2 = 0.0;
    mean_and_var(ni, rr.mean, rr.variance);
    mean_and_var(i2, mean_i2, var_i2);
    rr.normality = normality_stats(ni, 0.0, rep.sigma2_integral.value);
    rr.boundary_var_ratio = rr.variance > 0.0 ? var_i2 / rr.variance : 0.0;
    rr.ad_pass_1pct = rr.normality.ad_p > 0.01;
    rep.regions.push_back(rr);

    if (ri + 1 == seq.regions.size()) {
      const double sd = std::sqrt(rep.sigma2_integral.value);
      std::vector<double> sorted(ni);
      std::sort(sorted.begin(), sorted.end());
      rep.qq.reserve(sorted.size());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) /
                         static_cast<double>(sorted.size());
        rep.qq.emplace_back(normal_quantile(p), sorted[i] / sd);
      }
    }
  }
  rep.asymptotics_reached = rep.regions.back().ad_pass_1pct;
  return rep;
}

}  // namespace maxstab
