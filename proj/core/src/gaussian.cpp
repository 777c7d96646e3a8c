#include "maxstab/gaussian.hpp"

#include <cmath>
#include <map>

#include "maxstab/errors.hpp"

namespace maxstab {

PackedCholesky cholesky_with_jitter(Eigen::MatrixXd& c) {
  const std::size_t n = static_cast<std::size_t>(c.rows());
  PackedCholesky out;
  out.n = n;
  if (n == 0) return out;
  if (n > 20000)
    throw input_error("cholesky_with_jitter: site budget exceeded (max 20000)");
  const double scale = std::max(1.0, c.diagonal().maxCoeff());
  static constexpr double levels[] = {0.0, 1e-12, 1e-10, 1e-8};
  Eigen::MatrixXd work;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double jitter = levels[attempt] * scale;
    work = c;
    if (jitter > 0.0) work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
    if (llt.info() == Eigen::Success) {
      out.jitter = jitter;
      out.attempts = attempt + 1;
      out.rows.resize(n * (n + 1) / 2);
      for (std::size_t i = 0; i < n; ++i) {
        double* dst = out.rows.data() + i * (i + 1) / 2;
        for (std::size_t j = 0; j <= i; ++j) dst[j] = work(i, j);
      }
      return out;
    }
  }
  throw numerical_error(
      "cholesky_with_jitter: factorization failed after jitter escalation to 1e-8");
}

FbfSampler::FbfSampler(PowerVariogram v, SiteSet sites, std::array<double, 3> root)
    : sites_(std::move(sites)) {
  v.validate();
  sites_.validate();
  const int dim = sites_.dim;
  const std::size_t m = sites_.size();

  // Exact-coordinate dedup; repeated sites must not inflate the factorization
  // or break positive definiteness.
  std::map<std::array<double, 3>, long> seen;
  std::vector<std::size_t> unique_rows;
  map_.assign(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    std::array<double, 3> key = {0.0, 0.0, 0.0};
    bool is_root = true;
    for (int k = 0; k < dim; ++k) {
      key[k] = sites_.site(i)[k];
      is_root = is_root && key[k] == root[k];
    }
    if (is_root) continue;  // pinned to zero
    auto [it, inserted] = seen.try_emplace(key, static_cast<long>(unique_rows.size()));
    if (inserted) unique_rows.push_back(i);
    map_[i] = it->second;
  }

  const std::size_t u = unique_rows.size();
  Eigen::MatrixXd c(u, u);
  for (std::size_t a = 0; a < u; ++a) {
    const double* xa = sites_.site(unique_rows[a]);
    for (std::size_t b = 0; b <= a; ++b) {
      const double* xb = sites_.site(unique_rows[b]);
      const double cov = fbf_covariance(v, xa, xb, root.data(), dim);
      c(a, b) = cov;
      c(b, a) = cov;
    }
  }
  factor_ = cholesky_with_jitter(c);
}

void FbfSampler::sample(RngStream& g, std::vector<double>& out,
                        std::vector<double>& normals) const {
  const std::size_t u = factor_.n;
  normals.resize(2 * u);
  double* z = normals.data();
  double* w = normals.data() + u;
  for (std::size_t i = 0; i < u; ++i) z[i] = g.normal();
  for (std::size_t i = 0; i < u; ++i) {
    const double* r = factor_.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += r[j] * z[j];
    w[i] = acc;
  }
  out.resize(sites_.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = map_[i] < 0 ? 0.0 : w[static_cast<std::size_t>(map_[i])];
}

std::vector<double> FbfSampler::sample(RngStream& g) const {
  std::vector<double> out, scratch;
  sample(g, out, scratch);
  return out;
}

GaussianSample sample_fbf(const PowerVariogram& v, const SiteSet& sites,
                          std::uint64_t seed) {
  FbfSampler sampler(v, sites);
  RngStream g(seed, stream_id(StreamPurpose::field, 0));
  GaussianSample out;
  out.sites = sites;
  out.values = sampler.sample(g);
  out.jitter = sampler.factor().jitter;
  out.factor_attempts = sampler.factor().attempts;
  return out;
}

}  // namespace maxstab
