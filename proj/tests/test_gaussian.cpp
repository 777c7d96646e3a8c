#include <cmath>
#include <vector>

#include "doctest.h"

#include "maxstab/errors.hpp"
#include "maxstab/gaussian.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/stats.hpp"
#include "maxstab/variogram.hpp"

using namespace maxstab;

namespace {

SiteSet make_sites(std::initializer_list<std::array<double, 2>> pts) {
  SiteSet s;
  s.dim = 2;
  for (const auto& p : pts) s.push(p.data());
  return s;
}

}  // namespace

TEST_CASE("fbf covariance closed form") {
  const PowerVariogram v{2.0, 1.5};
  const double x[2] = {1.0, 0.0};
  const double y[2] = {0.0, 1.0};
  const double r[2] = {0.0, 0.0};
  // (gamma(x) + gamma(y) - gamma(x-y)) / 2 with |x|=|y|=1, |x-y|=sqrt(2)
  const double expect = 0.5 * (2.0 + 2.0 - 2.0 * std::pow(2.0, 0.75));
  CHECK(fbf_covariance(v, x, y, r, 2) == doctest::Approx(expect).epsilon(1e-14));
  // Variance at x equals gamma(x - root)
  CHECK(fbf_covariance(v, x, x, r, 2) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("fbf sampler matches its covariance") {
  const PowerVariogram v{1.0, 1.0};
  const SiteSet sites =
      make_sites({{0.0, 0.0}, {1.0, 0.0}, {0.0, 2.0}, {1.5, 1.5}});
  FbfSampler fbf(v, sites, {0.0, 0.0, 0.0});
  CHECK(fbf.unique_sites() == 3);  // the root site is pinned, not factored

  const long n = 40000;
  RngStream g(2024, 1);
  std::vector<double> w(sites.size());
  std::vector<double> scratch;
  std::vector<std::vector<double>> draws(sites.size(),
                                         std::vector<double>(n));
  for (long r = 0; r < n; ++r) {
    fbf.sample(g, w, scratch);
    CHECK(w[0] == 0.0);  // pinned exactly
    for (std::size_t i = 0; i < w.size(); ++i) draws[i][static_cast<std::size_t>(r)] = w[i];
  }
  const double root[2] = {0.0, 0.0};
  for (std::size_t i = 1; i < sites.size(); ++i)
    for (std::size_t j = i; j < sites.size(); ++j) {
      const double want =
          fbf_covariance(v, sites.site(i), sites.site(j), root, 2);
      double acc = 0.0;
      for (long r = 0; r < n; ++r)
        acc += draws[i][static_cast<std::size_t>(r)] * draws[j][static_cast<std::size_t>(r)];
      const double got = acc / static_cast<double>(n);
      // SE of a product moment is ~ sqrt((vii*vjj + vij^2)/n)
      const double vii = fbf_covariance(v, sites.site(i), sites.site(i), root, 2);
      const double vjj = fbf_covariance(v, sites.site(j), sites.site(j), root, 2);
      const double se = std::sqrt((vii * vjj + want * want) / static_cast<double>(n));
      CHECK(std::abs(got - want) < 4.0 * se);
    }
}

TEST_CASE("fbf duplicate sites share values") {
  const PowerVariogram v{1.0, 1.0};
  const SiteSet sites =
      make_sites({{1.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}, {2.0, 0.5}});
  FbfSampler fbf(v, sites, {0.0, 0.0, 0.0});
  CHECK(fbf.unique_sites() == 2);
  RngStream g(7, 3);
  for (int r = 0; r < 50; ++r) {
    const std::vector<double> w = fbf.sample(g);
    CHECK(w[0] == w[1]);
    CHECK(w[2] == w[3]);
    CHECK(w[0] != w[2]);
  }
}

TEST_CASE("alpha = 2 degenerates to linear rays") {
  // gamma(h) = |h|^2 makes W a linear form: W(t x) = t W(x) exactly.
  const PowerVariogram v{1.0, 2.0};
  SiteSet sites;
  sites.dim = 2;
  const double dir[2] = {0.6, -0.8};
  for (double t : {0.5, 1.0, 2.0, 3.5}) {
    const double p[2] = {t * dir[0], t * dir[1]};
    sites.push(p);
  }
  FbfSampler fbf(v, sites, {0.0, 0.0, 0.0});
  RngStream g(11, 0);
  // The rank-deficient covariance is factored with ~1e-11 diagonal jitter,
  // which puts an ~4e-6 absolute noise floor under the exact linearity.
  for (int r = 0; r < 200; ++r) {
    const std::vector<double> w = fbf.sample(g);
    const double base = w[1];  // t = 1
    CHECK(std::abs(w[0] - 0.5 * base) < 1e-4);
    CHECK(std::abs(w[2] - 2.0 * base) < 1e-4);
    CHECK(std::abs(w[3] - 3.5 * base) < 1e-4);
  }
}

TEST_CASE("sampler is deterministic in the stream") {
  const PowerVariogram v{1.0, 0.8};
  const SiteSet sites = make_sites({{0.0, 0.0}, {1.0, 2.0}, {3.0, 1.0}});
  FbfSampler fbf(v, sites, {0.0, 0.0, 0.0});
  RngStream g1(99, 5), g2(99, 5);
  const std::vector<double> a = fbf.sample(g1);
  const std::vector<double> b = fbf.sample(g2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("cholesky with jitter") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  const PackedCholesky f = cholesky_with_jitter(id);
  CHECK(f.n == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(f.row(i)[i] == doctest::Approx(1.0).epsilon(1e-12));

  // Rank-one PSD matrix needs the jitter path but must still factor.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 6);
  const PackedCholesky fo = cholesky_with_jitter(ones);
  CHECK(fo.n == 6);
  double diag2 = 0.0;
  for (std::size_t j = 0; j <= 1; ++j) {
    const double lj = fo.row(1)[j];
    diag2 += lj * lj;
  }
  CHECK(diag2 == doctest::Approx(1.0).epsilon(1e-6));  // reproduces variance 1

  Eigen::MatrixXd empty(0, 0);
  CHECK(cholesky_with_jitter(empty).n == 0);

  Eigen::MatrixXd indef = Eigen::MatrixXd::Identity(3, 3);
  indef(0, 0) = -5.0;  // genuinely negative, jitter cannot rescue it
  CHECK_THROWS_AS(cholesky_with_jitter(indef), numerical_error);
}
