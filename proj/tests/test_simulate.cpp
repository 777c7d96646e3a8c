#include <cmath>
#include <vector>

#include "doctest.h"

#include "maxstab/errors.hpp"
#include "maxstab/simulate.hpp"
#include "maxstab/stats.hpp"

using namespace maxstab;

namespace {

GridSpec grid2(long n, double delta) {
  GridSpec g;
  g.dim = 2;
  g.delta = delta;
  g.counts = {n, n, 1};
  return g;
}

SimulationControl ctl(std::uint64_t seed) {
  SimulationControl c;
  c.seed = seed;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("same replicate, same field") {
  const GridSpec g = grid2(4, 0.5);
  for (const ModelVariant& model :
       {ModelVariant(SmithModel::isotropic(2, 1.0)),
        ModelVariant(BrownResnickModel{{1.0, 1.0}})}) {
    FieldSimulator sim(model, ctl(77), g.sites(), &g);
    const std::vector<double> a = sim.sample(3);
    const std::vector<double> b = sim.sample(3);
    const std::vector<double> c = sim.sample(4);
    REQUIRE(a.size() == g.size());
    bool all_equal = true, any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      all_equal = all_equal && a[i] == b[i];
      any_diff = any_diff || a[i] != c[i];
    }
    CHECK(all_equal);
    CHECK(any_diff);
    for (double z : a) CHECK(z > 0.0);
  }
}

TEST_CASE("margins are standard Frechet") {
  const GridSpec g = grid2(3, 1.0);
  const long n = 4000;
  for (const ModelVariant& model :
       {ModelVariant(SmithModel::isotropic(2, 1.0)),
        ModelVariant(BrownResnickModel{{1.0, 1.0}})}) {
    FieldSimulator sim(model, ctl(2025), g.sites(), &g);
    std::vector<double> at_site(n);
    for (long r = 0; r < n; ++r)
      at_site[static_cast<std::size_t>(r)] = sim.sample(static_cast<std::uint64_t>(r))[4];
    const MarginCheck mc = margin_check(at_site);
    CHECK(mc.n == static_cast<std::size_t>(n));
    CHECK(mc.pass);
  }
}

TEST_CASE("threshold method is flagged, exact methods are not") {
  const GridSpec g = grid2(3, 0.5);
  const BrownResnickModel br{{1.0, 1.0}};

  SimulationControl c = ctl(5);
  c.method = SimMethod::br_threshold;
  FieldSimulator st(br, c, g.sites());
  SimulationInfo info;
  st.sample(0, &info);
  CHECK(info.method == SimMethod::br_threshold);
  CHECK(info.bias_possible);
  CHECK(info.threshold_bound > 0.0);
  CHECK(info.spectral_draws > 0);

  c.method = SimMethod::br_extremal;
  FieldSimulator se(br, c, g.sites(), &g);
  se.sample(0, &info);
  CHECK(info.method == SimMethod::br_extremal);
  CHECK_FALSE(info.bias_possible);
  CHECK(info.stopped_exactly);

  FieldSimulator ss(SmithModel::isotropic(2, 1.0), ctl(5), g.sites(), &g);
  ss.sample(0, &info);
  CHECK(info.method == SimMethod::smith_exact);
  CHECK_FALSE(info.bias_possible);
  CHECK(info.stopped_exactly);
  CHECK(info.truncation_bound < 1e-6);  // 6-sigma padding default
}

TEST_CASE("method must match the model") {
  const GridSpec g = grid2(2, 1.0);
  SimulationControl c = ctl(1);
  c.method = SimMethod::br_extremal;
  CHECK_THROWS_AS(FieldSimulator(SmithModel::isotropic(2, 1.0), c, g.sites(), &g),
                  input_error);
  c.method = SimMethod::smith_exact;
  CHECK_THROWS_AS(FieldSimulator(BrownResnickModel{{1.0, 1.0}}, c, g.sites()),
                  input_error);
}

TEST_CASE("draw budget exhaustion raises simulation_error") {
  const GridSpec g = grid2(3, 0.5);
  SimulationControl c = ctl(9);
  c.max_spectral_draws = 2;
  const BrownResnickModel br{{1.0, 1.0}};
  FieldSimulator sim(br, c, g.sites(), &g);
  CHECK_THROWS_AS(sim.sample(0), simulation_error);
}

TEST_CASE("free functions fill the realization header") {
  const GridSpec g = grid2(3, 0.5);
  const FieldRealization f = sample_smith(SmithModel::isotropic(2, 0.5), g, ctl(31), 7);
  f.validate();
  CHECK(f.replicate == 7);
  CHECK(f.seed == 31);
  CHECK(f.model_tag.find("smith") != std::string::npos);
  CHECK(f.info.method == SimMethod::smith_exact);

  const FieldRealization b = sample_brown_resnick(BrownResnickModel{{2.0, 1.5}}, g, ctl(31));
  b.validate();
  CHECK(b.info.method == SimMethod::br_extremal);
  CHECK(b.model_tag.find("brown-resnick") != std::string::npos);
}

TEST_CASE("gumbel transform and log-moment") {
  const GridSpec g = grid2(3, 1.0);
  FieldSimulator sim(SmithModel::isotropic(2, 1.0), ctl(404), g.sites(), &g);
  const long n = 4000;
  double acc = 0.0;
  for (long r = 0; r < n; ++r) {
    FieldRealization f;
    f.grid = g;
    f.values = sim.sample(static_cast<std::uint64_t>(r));
    const RealField lnz = gumbel_transform(f);
    CHECK(lnz.values.size() == f.values.size());
    CHECK(lnz.values[0] == doctest::Approx(std::log(f.values[0])).epsilon(1e-14));
    acc += lnz.values[0];
  }
  // E[ln Z] is the Euler-Mascheroni constant for a unit Frechet margin.
  const double mean = acc / static_cast<double>(n);
  const double se = 1.2825 / std::sqrt(static_cast<double>(n));  // sd pi/sqrt(6)
  CHECK(std::abs(mean - 0.5772156649015329) < 4.0 * se);
}

TEST_CASE("margin_check needs enough data") {
  std::vector<double> tiny(50, 1.0);
  CHECK_THROWS_AS(margin_check(tiny), input_error);
}
