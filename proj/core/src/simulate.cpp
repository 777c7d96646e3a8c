#include "maxstab/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "maxstab/errors.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/stats.hpp"

namespace maxstab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// P(chi2_dof > q) for dof = 1, 2, 3.
double chi_sq_tail(double q, int dof) {
  if (q <= 0.0) return 1.0;
  switch (dof) {
    case 1:
      return std::erfc(std::sqrt(0.5 * q));
    case 2:
      return std::exp(-0.5 * q);
    case 3:
      return std::erfc(std::sqrt(0.5 * q)) +
             std::sqrt(2.0 / std::numbers::pi) * std::sqrt(q) *
                 std::exp(-0.5 * q);
    default:
      throw input_error("chi_sq_tail: dof must be 1, 2 or 3");
  }
}

double dot_prefix(const double* row, const double* xi, std::size_t n) {
  return Eigen::Map<const Eigen::VectorXd>(row, static_cast<long>(n))
      .dot(Eigen::Map<const Eigen::VectorXd>(xi, static_cast<long>(n)));
}

}  // namespace

// ---------------------------------------------------------------------------
// SmithSampler

SmithSampler::SmithSampler(SmithModel model, SiteSet sites,
                           SimulationControl control, const GridSpec* grid)
    : model_(std::move(model)),
      control_(control),
      sites_(std::move(sites)) {
  model_.validate();
  control_.validate();
  sites_.validate();
  if (sites_.dim != model_.dim)
    throw input_error("SmithSampler: site dimension does not match model");
  if (sites_.size() == 0) throw input_error("SmithSampler: no sites");

  const int d = model_.dim;
  Eigen::MatrixXd sigma(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) sigma(r, c) = model_.sigma[r * d + c];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  lambda_max_ = es.eigenvalues().maxCoeff();

  // Pad the inverse into a 3x3 identity so the quadratic form below can run
  // over a fixed-size matrix regardless of dim.
  sigma_inv_.setIdentity();
  sigma_inv_.topLeftCorner(d, d) = sigma.inverse();
  fmax_ = std::pow(2.0 * std::numbers::pi, -0.5 * d) /
          std::sqrt(sigma.determinant());

  padding_ = control_.padding > 0.0 ? control_.padding
                                    : 6.0 * std::sqrt(lambda_max_);
  truncation_bound_ =
      static_cast<double>(sites_.size() > 0) *
      chi_sq_tail(padding_ * padding_ / lambda_max_, d);
  if (!(truncation_bound_ < 1e-6))
    throw input_error(
        "SmithSampler: storm-center padding too small, truncation bound "
        "exceeds 1e-6; increase padding");

  for (int k = 0; k < 3; ++k) {
    box_lo_[k] = 0.0;
    box_len_[k] = 0.0;
  }
  box_vol_ = 1.0;
  for (int k = 0; k < d; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      const double v = sites_.site(i)[k];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    box_lo_[k] = lo - padding_;
    box_len_[k] = (hi - lo) + 2.0 * padding_;
    box_vol_ *= box_len_[k];
  }

  if (grid) {
    grid->validate();
    if (grid->size() != sites_.size() || grid->dim != sites_.dim)
      throw input_error("SmithSampler: grid does not match site set");
    grid_ = *grid;
    grid_mode_ = true;
  }
}

std::vector<double> SmithSampler::sample(std::uint64_t replicate,
                                         SimulationInfo* info) const {
  RngStream g(control_.seed,
              stream_id(StreamPurpose::field, replicate));
  const std::size_t m = sites_.size();
  const int d = model_.dim;
  std::vector<double> z(m, 0.0);

  double gamma_seq = 0.0;
  double curmin = 0.0;
  bool min_dirty = false;
  std::uint64_t draws = 0;

  const auto quad_form = [&](const double* y) {
    double q = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) q += y[a] * sigma_inv_(a, b) * y[b];
    return q;
  };

  for (;;) {
    gamma_seq += g.exponential();
    const double u = box_vol_ / gamma_seq;
    if (min_dirty) {
      curmin = *std::min_element(z.begin(), z.end());
      min_dirty = false;
    }
    // No later storm can raise any site: weights only decrease and the
    // profile never exceeds fmax.
    if (u * fmax_ <= curmin) break;
    if (++draws > static_cast<std::uint64_t>(control_.max_spectral_draws))
      throw simulation_error("SmithSampler: spectral draw budget exhausted",
                             draws, curmin);

    double c[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) c[k] = box_lo_[k] + box_len_[k] * g.uniform();

    // Only sites with u * f(x - c) > curmin can change the field; f decays
    // with the Mahalanobis radius, so q(x - c) < q* bounds the search, and
    // the Euclidean radius r* covers it through the largest eigenvalue.
    // Log space: on wide grids curmin starts in the denormal range, where
    // u * fmax_ / curmin overflows and would blank the search window.
    const bool prune = curmin > 0.0;
    const double qstar =
        prune ? 2.0 * (std::log(box_vol_) - std::log(gamma_seq) +
                       std::log(fmax_) - std::log(curmin))
              : std::numeric_limits<double>::infinity();

    if (grid_mode_ && prune) {
      const double rstar = std::sqrt(qstar * lambda_max_);
      long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
      bool empty = false;
      for (int k = 0; k < d; ++k) {
        const double a = (c[k] - rstar - grid_.origin[k]) / grid_.delta - 0.5;
        const double b = (c[k] + rstar - grid_.origin[k]) / grid_.delta - 0.5;
        lo[k] = std::max(0L, static_cast<long>(std::ceil(a)));
        hi[k] = std::min(grid_.counts[k] - 1,
                         static_cast<long>(std::floor(b)));
        if (lo[k] > hi[k]) empty = true;
      }
      if (empty) continue;
      double y[3];
      for (long i0 = lo[0]; i0 <= hi[0]; ++i0) {
        for (long i1 = lo[1]; i1 <= hi[1]; ++i1) {
          for (long i2 = lo[2]; i2 <= hi[2]; ++i2) {
            y[0] = grid_.origin[0] + (i0 + 0.5) * grid_.delta - c[0];
            if (d > 1) y[1] = grid_.origin[1] + (i1 + 0.5) * grid_.delta - c[1];
            if (d > 2) y[2] = grid_.origin[2] + (i2 + 0.5) * grid_.delta - c[2];
            const double q = quad_form(y);
            if (q >= qstar) continue;
            const double val = u * fmax_ * std::exp(-0.5 * q);
            const std::size_t idx = static_cast<std::size_t>(
                (i0 * grid_.counts[1] + i1) * grid_.counts[2] + i2);
            if (val > z[idx]) {
              if (z[idx] <= curmin) min_dirty = true;
              z[idx] = val;
            }
          }
        }
      }
    } else {
      double y[3];
      for (std::size_t i = 0; i < m; ++i) {
        const double* x = sites_.site(i);
        for (int k = 0; k < d; ++k) y[k] = x[k] - c[k];
        const double q = quad_form(y);
        if (q >= qstar) continue;
        const double val = u * fmax_ * std::exp(-0.5 * q);
        if (val > z[i]) {
          if (z[i] <= curmin) min_dirty = true;
          z[i] = val;
        }
      }
    }
  }

  if (info) {
    info->method = SimMethod::smith_exact;
    info->spectral_draws = draws;
    info->stopped_exactly = true;
    info->truncation_bound = truncation_bound_;
    info->threshold_bound = 0.0;
    info->threshold_quantile = 0.0;
    info->bias_possible = false;
  }
  return z;
}

// ---------------------------------------------------------------------------
// BrThresholdSampler

BrThresholdSampler::BrThresholdSampler(BrownResnickModel model, SiteSet sites,
                                       SimulationControl control)
    : model_(std::move(model)),
      control_(control),
      sites_(std::move(sites)) {
  model_.variogram.validate();
  control_.validate();
  sites_.validate();
  if (sites_.size() == 0) throw input_error("BrThresholdSampler: no sites");

  const std::size_t m = sites_.size();
  const int d = sites_.dim;
  std::array<double, 3> root = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) root[k] += sites_.site(i)[k];
  for (int k = 0; k < d; ++k) root[k] /= static_cast<double>(m);

  fbf_ = std::make_unique<FbfSampler>(model_.variogram, sites_, root);

  half_var_.resize(m);
  double h[3];
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = sites_.site(i);
    for (int k = 0; k < d; ++k) h[k] = x[k] - root[k];
    half_var_[i] = 0.5 * model_.variogram(h, d);
  }

  // Pilot: empirical quantile of sup_x Y(x) over unconditioned spectral
  // draws. An a.s. finite stand-in for the unbounded essential sup.
  RngStream pg(control_.seed, stream_id(StreamPurpose::pilot, 0));
  std::vector<double> sups(static_cast<std::size_t>(control_.pilot_draws));
  std::vector<double> w, scratch;
  for (auto& s : sups) {
    fbf_->sample(pg, w, scratch);
    double best = kNegInf;
    for (std::size_t i = 0; i < m; ++i)
      best = std::max(best, w[i] - half_var_[i]);
    s = std::exp(best);
  }
  bound_ = empirical_quantile(sups, control_.quantile_bound);
}

std::vector<double> BrThresholdSampler::sample(std::uint64_t replicate,
                                               SimulationInfo* info) const {
  RngStream g(control_.seed, stream_id(StreamPurpose::field, replicate));
  const std::size_t m = sites_.size();
  std::vector<double> logz(m, kNegInf);
  const double lbound = std::log(bound_);

  double gamma_seq = 0.0;
  double curmin = kNegInf;
  bool min_dirty = false;
  std::uint64_t draws = 0;
  std::vector<double> w, scratch;

  for (;;) {
    gamma_seq += g.exponential();
    const double lu = -std::log(gamma_seq);
    if (min_dirty) {
      curmin = *std::min_element(logz.begin(), logz.end());
      min_dirty = false;
    }
    if (lu + lbound <= curmin && curmin > kNegInf) break;
    if (++draws > static_cast<std::uint64_t>(control_.max_spectral_draws))
      throw simulation_error(
          "BrThresholdSampler: spectral draw budget exhausted", draws,
          std::exp(curmin));

    fbf_->sample(g, w, scratch);
    for (std::size_t i = 0; i < m; ++i) {
      const double cand = lu + w[i] - half_var_[i];
      if (cand > logz[i]) {
        if (logz[i] <= curmin) min_dirty = true;
        logz[i] = cand;
      }
    }
  }

  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = std::exp(logz[i]);

  if (info) {
    info->method = SimMethod::br_threshold;
    info->spectral_draws = draws;
    info->stopped_exactly = false;
    info->truncation_bound = 0.0;
    info->threshold_bound = bound_;
    info->threshold_quantile = control_.quantile_bound;
    info->bias_possible = true;
  }
  return z;
}

// ---------------------------------------------------------------------------
// BrExtremalSampler

// Scratch for one spectral draw: a fresh normal vector extended lazily and
// the Gaussian field values already derived from it.
struct DrawState {
  RngStream* g = nullptr;
  std::vector<double> xi;
  std::size_t xi_len = 0;
  std::vector<double> w;
  std::vector<std::uint64_t> stamp;
  std::uint64_t epoch = 0;
};

BrExtremalSampler::BrExtremalSampler(BrownResnickModel model, SiteSet sites,
                                     SimulationControl control,
                                     const GridSpec* grid)
    : model_(std::move(model)),
      control_(control),
      sites_(std::move(sites)) {
  model_.variogram.validate();
  control_.validate();
  sites_.validate();
  const std::size_t m = sites_.size();
  if (m == 0) throw input_error("BrExtremalSampler: no sites");
  const int d = sites_.dim;

  {
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(
          sites_.site(a), sites_.site(a) + d, sites_.site(b),
          sites_.site(b) + d);
    });
    for (std::size_t t = 1; t < m; ++t)
      if (std::equal(sites_.site(order[t - 1]), sites_.site(order[t - 1]) + d,
                     sites_.site(order[t])))
        throw input_error("BrExtremalSampler: duplicate site coordinates");
  }

  if (grid) {
    grid->validate();
    if (grid->size() != m || grid->dim != d)
      throw input_error("BrExtremalSampler: grid does not match site set");
    grid_ = *grid;
    grid_mode_ = true;

    cell_.resize(m);
    for (std::size_t i = 0; i < m; ++i) grid_.unflatten(i, cell_[i].data());

    for (int k = 0; k < 3; ++k) table_dims_[k] = 2 * grid_.counts[k] - 1;
    gamma_table_.resize(static_cast<std::size_t>(table_dims_[0]) *
                        table_dims_[1] * table_dims_[2]);
    double h[3];
    std::size_t idx = 0;
    for (long o0 = 1 - grid_.counts[0]; o0 < grid_.counts[0]; ++o0)
      for (long o1 = 1 - grid_.counts[1]; o1 < grid_.counts[1]; ++o1)
        for (long o2 = 1 - grid_.counts[2]; o2 < grid_.counts[2]; ++o2) {
          h[0] = o0 * grid_.delta;
          h[1] = o1 * grid_.delta;
          h[2] = o2 * grid_.delta;
          gamma_table_[idx++] = 0.5 * model_.variogram(h, d);
        }

    // Nearest index offsets, used to test a candidate against the sites
    // where a violation is most likely before the full scan.
    struct Off {
      long o[3];
      double nsq;
    };
    std::vector<Off> offs;
    const long reach = 8;
    for (long o0 = -std::min(reach, grid_.counts[0] - 1);
         o0 <= std::min(reach, grid_.counts[0] - 1); ++o0)
      for (long o1 = -std::min(reach, grid_.counts[1] - 1);
           o1 <= std::min(reach, grid_.counts[1] - 1); ++o1)
        for (long o2 = -std::min(reach, grid_.counts[2] - 1);
             o2 <= std::min(reach, grid_.counts[2] - 1); ++o2) {
          if (o0 == 0 && o1 == 0 && o2 == 0) continue;
          offs.push_back(
              {{o0, o1, o2},
               static_cast<double>(o0 * o0 + o1 * o1 + o2 * o2)});
        }
    std::sort(offs.begin(), offs.end(),
              [](const Off& a, const Off& b) { return a.nsq < b.nsq; });
    const std::size_t keep = std::min<std::size_t>(offs.size(), 64);
    near_offsets_.reserve(4 * keep);
    for (std::size_t t = 0; t < keep; ++t) {
      const auto& o = offs[t];
      const long tix =
          ((o.o[0] + grid_.counts[0] - 1) * table_dims_[1] +
           (o.o[1] + grid_.counts[1] - 1)) *
              table_dims_[2] +
          (o.o[2] + grid_.counts[2] - 1);
      near_offsets_.push_back(static_cast<std::int32_t>(o.o[0]));
      near_offsets_.push_back(static_cast<std::int32_t>(o.o[1]));
      near_offsets_.push_back(static_cast<std::int32_t>(o.o[2]));
      near_offsets_.push_back(static_cast<std::int32_t>(tix));
    }
  } else if (m <= 4096) {
    gamma_dense_.resize(m * m);
    double h[3];
    for (std::size_t i = 0; i < m; ++i) {
      const double* xi_ = sites_.site(i);
      for (std::size_t j = 0; j < m; ++j) {
        const double* xj = sites_.site(j);
        for (int k = 0; k < d; ++k) h[k] = xi_[k] - xj[k];
        gamma_dense_[i * m + j] = 0.5 * model_.variogram(h, d);
      }
    }
    if (m <= 1024 && m > 1) {
      near_order_.resize(m * (m - 1));
      std::vector<std::int32_t> idxs(m - 1);
      for (std::size_t i = 0; i < m; ++i) {
        std::size_t t = 0;
        for (std::size_t j = 0; j < m; ++j)
          if (j != i) idxs[t++] = static_cast<std::int32_t>(j);
        std::sort(idxs.begin(), idxs.end(),
                  [&](std::int32_t a, std::int32_t b) {
                    return gamma_dense_[i * m + a] < gamma_dense_[i * m + b];
                  });
        std::copy(idxs.begin(), idxs.end(),
                  near_order_.begin() + static_cast<long>(i * (m - 1)));
      }
    }
  }

  // Gaussian factor for sites 1..m-1 with the field pinned to zero at site 0.
  if (m > 1) {
    Eigen::MatrixXd cov(m - 1, m - 1);
    std::vector<double> gr(m);
    double h[3];
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = sites_.site(i);
      for (int k = 0; k < d; ++k) h[k] = x[k] - sites_.site(0)[k];
      gr[i] = model_.variogram(h, d);
    }
    for (std::size_t a = 1; a < m; ++a)
      for (std::size_t b = 1; b <= a; ++b) {
        const double gab = 2.0 * half_gamma(a, b);
        cov(static_cast<long>(a - 1), static_cast<long>(b - 1)) =
            cov(static_cast<long>(b - 1), static_cast<long>(a - 1)) =
                0.5 * (gr[a] + gr[b] - gab);
      }
    factor_ = cholesky_with_jitter(cov);
  }
}

double BrExtremalSampler::half_gamma(std::size_t i, std::size_t k) const {
  if (grid_mode_) {
    const auto& ci = cell_[i];
    const auto& ck = cell_[k];
    const long idx = ((ci[0] - ck[0] + grid_.counts[0] - 1) * table_dims_[1] +
                      (ci[1] - ck[1] + grid_.counts[1] - 1)) *
                         table_dims_[2] +
                     (ci[2] - ck[2] + grid_.counts[2] - 1);
    return gamma_table_[static_cast<std::size_t>(idx)];
  }
  if (!gamma_dense_.empty()) return gamma_dense_[i * sites_.size() + k];
  double h[3];
  const double* a = sites_.site(i);
  const double* b = sites_.site(k);
  for (int t = 0; t < sites_.dim; ++t) h[t] = a[t] - b[t];
  return 0.5 * model_.variogram(h, sites_.dim);
}

double BrExtremalSampler::eval_w(std::size_t i, DrawState& s) const {
  if (i == 0) return 0.0;
  if (s.stamp[i] == s.epoch) return s.w[i];
  if (s.xi_len < i) {
    for (std::size_t t = s.xi_len; t < i; ++t) s.xi[t] = s.g->normal();
    s.xi_len = i;
  }
  const double v = dot_prefix(factor_.row(i - 1), s.xi.data(), i);
  s.w[i] = v;
  s.stamp[i] = s.epoch;
  return v;
}

std::vector<double> BrExtremalSampler::sample(std::uint64_t replicate,
                                              SimulationInfo* info) const {
  RngStream g(control_.seed, stream_id(StreamPurpose::field, replicate));
  const std::size_t m = sites_.size();
  std::vector<double> logz(m, kNegInf);

  DrawState s;
  s.g = &g;
  s.xi.resize(m > 1 ? m - 1 : 0);
  s.w.resize(m);
  s.stamp.assign(m, 0);

  std::uint64_t draws = 0;
  const std::uint64_t budget =
      static_cast<std::uint64_t>(control_.max_spectral_draws);

  for (std::size_t k = 0; k < m; ++k) {
    double zeta = g.exponential();
    // Candidates at site k arrive at heights -log zeta; once that falls to
    // the running maximum there, no later candidate can matter and the value
    // at site k is final.
    while (-std::log(zeta) > logz[k]) {
      if (++draws > budget)
        throw simulation_error(
            "BrExtremalSampler: spectral draw budget exhausted", draws,
            std::exp(logz[k]));
      ++s.epoch;
      s.xi_len = 0;
      const double wk = eval_w(k, s);
      const double c = -std::log(zeta) - wk;

      // Keep the candidate only if it stays below the (final) maximum at
      // every earlier site; nearby sites are the likely violators, so test
      // them first.
      bool ok = true;
      if (grid_mode_) {
        const auto& ck = cell_[k];
        for (std::size_t t = 0; t + 3 < near_offsets_.size(); t += 4) {
          const long j0 = ck[0] + near_offsets_[t];
          const long j1 = ck[1] + near_offsets_[t + 1];
          const long j2 = ck[2] + near_offsets_[t + 2];
          if (j0 < 0 || j0 >= grid_.counts[0] || j1 < 0 ||
              j1 >= grid_.counts[1] || j2 < 0 || j2 >= grid_.counts[2])
            continue;
          const std::size_t j = static_cast<std::size_t>(
              (j0 * grid_.counts[1] + j1) * grid_.counts[2] + j2);
          if (j >= k) continue;
          // Fourth slot holds the offset's precomputed gamma-table index.
          const auto tix = static_cast<std::size_t>(near_offsets_[t + 3]);
          if (c + eval_w(j, s) - gamma_table_[tix] >= logz[j]) {
            ok = false;
            break;
          }
        }
      } else if (!near_order_.empty() && k > 0) {
        const std::size_t row = k * (m - 1);
        const std::size_t nn = std::min<std::size_t>(m - 1, 64);
        for (std::size_t t = 0; t < nn; ++t) {
          const std::size_t j =
              static_cast<std::size_t>(near_order_[row + t]);
          if (j >= k) continue;
          if (c + eval_w(j, s) - half_gamma(j, k) >= logz[j]) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        for (std::size_t j = 0; j < k; ++j) {
          if (c + eval_w(j, s) - half_gamma(j, k) >= logz[j]) {
            ok = false;
            break;
          }
        }
      }

      if (ok) {
        for (std::size_t i = 0; i < m; ++i) {
          const double cand = c + eval_w(i, s) - half_gamma(i, k);
          if (cand > logz[i]) logz[i] = cand;
        }
        break;  // -log zeta is now the value at site k; the next test exits
      }
      zeta += g.exponential();
    }
  }

  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = std::exp(logz[i]);

  if (info) {
    info->method = SimMethod::br_extremal;
    info->spectral_draws = draws;
    info->stopped_exactly = true;
    info->truncation_bound = 0.0;
    info->threshold_bound = 0.0;
    info->threshold_quantile = 0.0;
    info->bias_possible = false;
  }
  return z;
}

// ---------------------------------------------------------------------------
// FieldSimulator

SimMethod resolve_method(const ModelVariant& model,
                         const std::optional<SimMethod>& requested) {
  if (!requested) return default_method(model);
  const bool smith = std::holds_alternative<SmithModel>(model);
  if (*requested == SimMethod::smith_exact && !smith)
    throw input_error("method smith-exact requires a Smith model");
  if (*requested != SimMethod::smith_exact && smith)
    throw input_error("Smith model simulates with method smith-exact");
  return *requested;
}

namespace {

std::variant<SmithSampler, BrThresholdSampler, BrExtremalSampler> make_impl(
    const ModelVariant& model, const SimulationControl& control,
    const SiteSet& sites, const GridSpec* grid, SimMethod method) {
  switch (method) {
    case SimMethod::smith_exact:
      return SmithSampler(std::get<SmithModel>(model), sites, control, grid);
    case SimMethod::br_threshold:
      return BrThresholdSampler(std::get<BrownResnickModel>(model), sites,
                                control);
    case SimMethod::br_extremal:
    default:
      return BrExtremalSampler(std::get<BrownResnickModel>(model), sites,
                               control, grid);
  }
}

}  // namespace

FieldSimulator::FieldSimulator(ModelVariant model, SimulationControl control,
                               SiteSet sites, const GridSpec* grid)
    : sites_(std::move(sites)),
      method_(resolve_method(model, control.method)),
      impl_(make_impl(model, control, sites_, grid, method_)) {}

std::vector<double> FieldSimulator::sample(std::uint64_t replicate,
                                           SimulationInfo* info) const {
  return std::visit(
      [&](const auto& s) { return s.sample(replicate, info); }, impl_);
}

FieldRealization sample_smith(const SmithModel& model, const GridSpec& grid,
                              const SimulationControl& control,
                              std::uint64_t replicate) {
  FieldSimulator sim(ModelVariant{model}, control, grid.sites(), &grid);
  FieldRealization out;
  out.grid = grid;
  out.values = sim.sample(replicate, &out.info);
  out.seed = control.seed;
  out.replicate = replicate;
  out.model_tag = model_tag(ModelVariant{model});
  out.validate();
  return out;
}

FieldRealization sample_brown_resnick(const BrownResnickModel& model,
                                      const GridSpec& grid,
                                      const SimulationControl& control,
                                      std::uint64_t replicate) {
  FieldSimulator sim(ModelVariant{model}, control, grid.sites(), &grid);
  FieldRealization out;
  out.grid = grid;
  out.values = sim.sample(replicate, &out.info);
  out.seed = control.seed;
  out.replicate = replicate;
  out.model_tag = model_tag(ModelVariant{model});
  out.validate();
  return out;
}

RealField gumbel_transform(const FieldRealization& f) {
  RealField out;
  out.grid = f.grid;
  out.values.resize(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out.values[i] = std::log(f.values[i]);
  return out;
}

namespace {

double invert_kolmogorov(double level) {
  double lo = 1e-3, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_tail(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MarginCheck margin_check(std::span<const double> values, double level) {
  if (values.size() < 100)
    throw input_error("margin_check: need at least 100 replicates");
  if (!(level > 0.0 && level < 1.0))
    throw input_error("margin_check: level must be in (0, 1)");
  std::vector<double> u(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw input_error("margin_check: values must be positive");
    u[i] = std::exp(-1.0 / values[i]);
  }
  const GofTest ks = kolmogorov_smirnov(u);
  const double n = static_cast<double>(values.size());
  const double scale = std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n);
  MarginCheck out;
  out.statistic = ks.statistic;
  out.threshold = invert_kolmogorov(level) / scale;
  out.n = values.size();
  out.pass = ks.statistic < out.threshold;
  return out;
}

}  // namespace maxstab
