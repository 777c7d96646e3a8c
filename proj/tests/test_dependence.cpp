#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "maxstab/dependence.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/simulate.hpp"

using namespace maxstab;

namespace {

SimulationControl ctl(std::uint64_t seed) {
  SimulationControl c;
  c.seed = seed;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("theta closed forms") {
  const ModelVariant smith = SmithModel::isotropic(2, 1.0);
  const ModelVariant br = BrownResnickModel{{1.0, 1.0}};
  const double h1[2] = {1.0, 0.0};
  const double h4[2] = {4.0, 0.0};

  // Smith identity Sigma: 2 Phi(|h|/2); BR eta=1 alpha=1: 2 Phi(sqrt(|h|)/2).
  CHECK(theta_closed_form(smith, h1, 2) ==
        doctest::Approx(1.3829249225480262).epsilon(1e-12));
  CHECK(theta_closed_form(br, h1, 2) ==
        doctest::Approx(1.3829249225480262).epsilon(1e-12));
  CHECK(theta_closed_form(smith, h4, 2) ==
        doctest::Approx(1.9544997361036416).epsilon(1e-12));  // 2 Phi(2)
  CHECK(theta_closed_form(br, h4, 2) ==
        doctest::Approx(1.6826894921370859).epsilon(1e-12));  // 2 Phi(1)

  // Anisotropic Smith: quadratic form, not the norm.
  SmithModel aniso;
  aniso.dim = 2;
  aniso.sigma = {4.0, 0.0, 0.0, 1.0};
  const double hx[2] = {2.0, 0.0};
  const double hy[2] = {0.0, 1.0};
  CHECK(theta_closed_form(aniso, hx, 2) ==
        doctest::Approx(1.3829249225480262).epsilon(1e-12));
  CHECK(theta_closed_form(aniso, hy, 2) ==
        doctest::Approx(1.3829249225480262).epsilon(1e-12));
}

TEST_CASE("pairwise theta estimate matches the closed form") {
  const long n = 20000;
  for (const ModelVariant& model :
       {ModelVariant(SmithModel::isotropic(2, 1.0)),
        ModelVariant(BrownResnickModel{{1.0, 1.0}})}) {
    const double h[2] = {1.5, 0.0};
    const ThetaEstimate est = estimate_theta_pair(model, h, 2, ctl(1234), n);
    const double want = theta_closed_form(model, h, 2);
    CHECK(est.n_replicates == n);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - want) < 3.0 * est.std_error);
  }
}

TEST_CASE("areal theta bounds") {
  // Singleton: theta = 1. Distant pair: approaches 2.
  SiteSet one;
  one.dim = 2;
  const double p[2] = {0.3, 0.4};
  one.push(p);
  const ThetaEstimate t1 = estimate_theta_areal(SmithModel::isotropic(2, 1.0),
                                                one, ctl(8), 5000);
  CHECK(std::abs(t1.value - 1.0) < 3.0 * t1.std_error);

  const double far_h[2] = {50.0, 0.0};
  const ThetaEstimate t2 =
      estimate_theta_pair(SmithModel::isotropic(2, 1.0), far_h, 2, ctl(8), 5000);
  CHECK(std::abs(t2.value - 2.0) < 3.0 * t2.std_error);
}

TEST_CASE("nu at a far lag is near zero, near lag is near theta") {
  const ModelVariant smith = SmithModel::isotropic(2, 1.0);
  const NuEstimate far =
      estimate_nu(smith, {40, 0, 0}, 2, 0.5, ctl(55), 3000);
  CHECK(std::abs(far.value) < 4.0 * far.std_error);
  CHECK(far.norm_euclid == doctest::Approx(40.0));
  CHECK(far.norm_chebyshev == doctest::Approx(40.0));

  // theta(A), theta(B) from the same replicates are identically distributed
  // cubes; their union at lag 1 overlaps heavily in dependence.
  const NuEstimate near =
      estimate_nu(smith, {1, 0, 0}, 2, 0.5, ctl(56), 3000);
  CHECK(near.value > 3.0 * near.std_error);
  CHECK(near.theta_union <= near.theta_a + near.theta_b + 1e-12);
}

TEST_CASE("nu model dim must be consistent") {
  CHECK_THROWS_AS(
      estimate_nu(SmithModel::isotropic(3, 1.0), {1, 0, 0}, 2, 0.5, ctl(1), 200),
      input_error);
}

TEST_CASE("decay fit recovers a synthetic power law") {
  std::vector<NuEstimate> pts;
  for (double r : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0}) {
    NuEstimate e;
    e.lag = {static_cast<long>(r), 0, 0};
    e.norm_euclid = r;
    e.norm_chebyshev = r;
    e.value = 5.0 * std::pow(r, -7.0);
    e.std_error = e.value / 100.0;  // all comfortably above noise
    e.n_replicates = 1000;
    pts.push_back(e);
  }
  const DecayFit f = fit_decay(pts, 2, 1.0);
  CHECK(f.b_hat == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(f.k_hat == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.threshold == doctest::Approx(6.0));  // d * max(2, (2+delta)/delta), d=2
  CHECK(f.lags_used == 6);
  CHECK(f.window_lo == doctest::Approx(1.0));
  CHECK(f.window_hi == doctest::Approx(8.0));

  // Points lost in noise are excluded; too few survivors -> input error.
  for (auto& e : pts) e.std_error = e.value;  // nothing beats 3 SE now
  CHECK_THROWS_AS(fit_decay(pts, 2, 1.0), input_error);
}

TEST_CASE("decay threshold tracks the moment exponent") {
  std::vector<NuEstimate> pts;
  for (double r : {1.0, 2.0, 4.0, 8.0}) {
    NuEstimate e;
    e.norm_euclid = r;
    e.value = std::pow(r, -9.0);
    e.std_error = e.value / 50.0;
    pts.push_back(e);
  }
  // delta = 0.5: (2 + delta)/delta = 5 > 2, so threshold = 2 * 5 = 10.
  const DecayFit f = fit_decay(pts, 2, 0.5);
  CHECK(f.threshold == doctest::Approx(10.0));
  // delta = 2: max(2, 2) = 2, threshold = 4.
  const DecayFit f2 = fit_decay(pts, 2, 2.0);
  CHECK(f2.threshold == doctest::Approx(4.0));
}

TEST_CASE("mixing bound from theta") {
  const MixingBound b = mixing_alpha_bound(1.5);
  CHECK(b.alpha_bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(b.clamped);

  const MixingBound c = mixing_alpha_bound(2.04);  // noise above 2, clamp
  CHECK(c.alpha_bound == doctest::Approx(0.0));
  CHECK(c.clamped);

  const MixingBound d = mixing_alpha_bound(0.97);  // noise below 1, clamp
  CHECK(d.alpha_bound == doctest::Approx(2.0));
  CHECK(d.clamped);

  CHECK_THROWS_AS(mixing_alpha_bound(2.5), input_error);
  CHECK_THROWS_AS(mixing_alpha_bound(0.5), input_error);
}

TEST_CASE("cz estimate on a singleton is one") {
  SiteSet one;
  one.dim = 2;
  const double p[2] = {0.0, 0.0};
  one.push(p);
  const CzEstimate c =
      estimate_cz(SmithModel::isotropic(2, 1.0), one, ctl(3), 5000);
  // E[1/Z] = 1 for unit Frechet.
  CHECK(std::abs(c.value - 1.0) < 3.0 * c.std_error);
}

TEST_CASE("cube sites") {
  const SiteSet s = cube_sites(2, {1.0, 2.0, 0.0}, 1.0, 0.25);
  CHECK(s.size() == 16);
  CHECK(s.dim == 2);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.site(i)[0] > 1.0);
    CHECK(s.site(i)[0] < 2.0);
    CHECK(s.site(i)[1] > 2.0);
    CHECK(s.site(i)[1] < 3.0);
  }
  CHECK_THROWS_AS(cube_sites(2, {0.0, 0.0, 0.0}, 1.0, 0.3), input_error);
}
