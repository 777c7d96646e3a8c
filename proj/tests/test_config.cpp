#include <string>
#include <variant>
#include <vector>

#include "doctest.h"

#include "maxstab/config.hpp"
#include "maxstab/errors.hpp"

using namespace maxstab;

namespace {

// Collects the accumulated messages so tests can assert on counts and text.
std::vector<std::string> parse_errors(const std::string& text, Command cmd) {
  try {
    parse_config(text, cmd);
  } catch (const config_error& e) {
    return e.messages();
  }
  return {};
}

bool mentions(const std::vector<std::string>& msgs, const std::string& what) {
  for (const std::string& m : msgs)
    if (m.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("command names") {
  CHECK(command_from_string("simulate") == Command::simulate);
  CHECK(command_from_string("theta") == Command::theta);
  CHECK(command_from_string("nu-decay") == Command::nu_decay);
  CHECK(command_from_string("clt") == Command::clt);
  CHECK(command_from_string("risk") == Command::risk);
  CHECK(to_string(Command::nu_decay) == "nu-decay");
  CHECK_THROWS_AS(command_from_string("frobnicate"), config_error);
}

TEST_CASE("empty text yields the documented defaults") {
  const ExperimentConfig c = parse_config("", Command::simulate);
  CHECK(c.dim == 2);
  CHECK(std::holds_alternative<SmithModel>(c.model));
  CHECK(std::get<SmithModel>(c.model).sigma ==
        std::vector<double>{1.0, 0.0, 0.0, 1.0});
  CHECK(c.delta == 0.25);
  CHECK(c.extent == 10.0);
  CHECK(c.replicates == 500);
  CHECK(c.control.seed == 1);
  CHECK_FALSE(c.control.method.has_value());
}

TEST_CASE("default lag sets") {
  CHECK(default_nu_lags(1).size() == 6);
  CHECK(default_nu_lags(2).size() == 9);
  CHECK(default_nu_lags(3).size() == 9);
  // Axis lags come first, diagonals after.
  const auto lags = default_nu_lags(2);
  CHECK(lags[0] == std::array<long, 3>{1, 0, 0});
  CHECK(lags[6] == std::array<long, 3>{1, 1, 0});
}

TEST_CASE("round trip through the canonical form") {
  const char* texts[] = {
      "model.type = smith\n"
      "model.sigma = 4 1 1 2\n"
      "control.seed = 99\n"
      "control.replicates = 7\n"
      "grid.delta = 0.5\n"
      "grid.extent = 12\n"
      "grid.origin = -1 0.5\n",

      "model.type = brown-resnick\n"
      "model.eta = 2.5\n"
      "model.alpha = 1.5\n"
      "control.method = br-threshold\n"
      "control.quantile_bound = 0.99\n"
      "theta.lags = 0.5 1 2\n",

      "model.type = brown-resnick\n"
      "nu.lags = 1 0; 0 2; 3 3\n"
      "nu.delta_moment = 0.5\n"
      "grid.delta = 0.2\n",

      "clt.lengths = 4 8 16\n"
      "clt.functional = threshold\n"
      "clt.z0 = 3\n"
      "clt.sigma2_n = 150\n"
      "clt.plug_in_mu = true\n"
      "grid.delta = 0.5\n",

      "risk.u = 2\n"
      "risk.levels = 0.8 0.99\n"
      "risk.lengths = 5 10\n"
      "risk.synthetic = true\n"
      "grid.delta = 0.25\n"
      "control.replicates = 300\n",
  };
  const Command cmds[] = {Command::simulate, Command::theta, Command::nu_decay,
                          Command::clt, Command::risk};
  for (int i = 0; i < 5; ++i) {
    CAPTURE(i);
    const ExperimentConfig a = parse_config(texts[i], cmds[i]);
    const ExperimentConfig b = parse_config(serialize_config(a), cmds[i]);
    CHECK(a == b);
    // And the canonical form is a fixed point.
    CHECK(serialize_config(a) == serialize_config(b));
  }
}

TEST_CASE("default nu lags are materialized before serialization") {
  const ExperimentConfig c = parse_config("", Command::nu_decay);
  CHECK(c.nu_lags == default_nu_lags(2));
  const ExperimentConfig r = parse_config(serialize_config(c), Command::nu_decay);
  CHECK(r == c);
}

TEST_CASE("functional parameters are parsed per kind") {
  ExperimentConfig c =
      parse_config("clt.functional = log\ngrid.delta = 0.5\n", Command::clt);
  CHECK(c.functional.kind == CostFunctional::Kind::log_identity);
  c = parse_config("clt.functional = constant\nclt.c = 2.5\ngrid.delta = 1\n",
                   Command::clt);
  CHECK(c.functional.param == 2.5);
  c = parse_config("clt.u = 1.5\ngrid.delta = 1\n", Command::clt);
  CHECK(c.functional.kind == CostFunctional::Kind::deductible_log);
  CHECK(c.functional.param == 1.5);
}

TEST_CASE("errors accumulate with line numbers") {
  const auto msgs = parse_errors(
      "model.type = smith\n"
      "model.variance = -1\n"
      "control.threads = -2\n"
      "this line has no equals\n"
      "grid.extent = 0\n",
      Command::simulate);
  REQUIRE(msgs.size() >= 4);
  CHECK(mentions(msgs, "line 2:"));
  CHECK(mentions(msgs, "model.variance must be positive"));
  CHECK(mentions(msgs, "line 3:"));
  CHECK(mentions(msgs, "control.threads must be >= 0"));
  CHECK(mentions(msgs, "line 4: expected 'key = value'"));
  CHECK(mentions(msgs, "grid.extent must be positive"));

  // The what() string carries every message.
  try {
    parse_config("model.dim = 7\n", Command::simulate);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("configuration rejected:") == 0);
    CHECK(std::string(e.what()).find("model.dim must be 1, 2 or 3") !=
          std::string::npos);
  }
}

TEST_CASE("structural mistakes are reported individually") {
  CHECK(mentions(parse_errors("control.seed = 1\ncontrol.seed = 2\n",
                              Command::simulate),
                 "duplicate key 'control.seed'"));
  CHECK(mentions(parse_errors("control.seed =\n", Command::simulate),
                 "empty value for 'control.seed'"));
  CHECK(mentions(parse_errors("= 5\n", Command::simulate), "empty key"));
  CHECK(mentions(parse_errors("fred = 5\n", Command::simulate),
                 "unknown or misplaced key 'fred'"));
  CHECK(mentions(parse_errors("control.seed = banana\n", Command::simulate),
                 "control.seed"));
}

TEST_CASE("keys of other commands are rejected") {
  CHECK(mentions(parse_errors("theta.lags = 1 2\n", Command::simulate),
                 "unknown or misplaced key 'theta.lags'"));
  CHECK(mentions(parse_errors("grid.delta = 0.5\n", Command::theta),
                 "is not used by command 'theta'"));
  CHECK(mentions(parse_errors("grid.extent = 10\n", Command::clt),
                 "is only used by command 'simulate'"));
}

TEST_CASE("model block cross checks") {
  CHECK(mentions(
      parse_errors("model.variance = 2\nmodel.sigma = 1 0 0 1\n", Command::simulate),
      "not both"));
  CHECK(mentions(
      parse_errors("model.type = smith\nmodel.eta = 1\n", Command::simulate),
      "does not apply to model.type = smith"));
  CHECK(mentions(
      parse_errors("model.type = brown-resnick\nmodel.sigma = 1 0 0 1\n",
                   Command::simulate),
      "does not apply to model.type = brown-resnick"));
  CHECK(mentions(parse_errors("model.sigma = 1 0 0\n", Command::simulate),
                 "dim*dim"));
  CHECK(mentions(parse_errors("model.sigma = 1 2 0 1\n", Command::simulate),
                 "symmetric"));
  const auto alpha = parse_errors(
      "model.type = brown-resnick\nmodel.alpha = 2.5\n", Command::simulate);
  CHECK(mentions(alpha, "(0, 2]"));
}

TEST_CASE("method must suit the model") {
  CHECK(mentions(
      parse_errors("model.type = smith\ncontrol.method = br-extremal\n",
                   Command::simulate),
      "control.method does not match model.type"));
  CHECK(mentions(
      parse_errors("model.type = brown-resnick\ncontrol.method = smith-exact\n",
                   Command::simulate),
      "control.method does not match model.type"));
  CHECK(mentions(parse_errors("control.method = sideways\n", Command::simulate),
                 "control.method must be auto"));
  // auto is always acceptable.
  const ExperimentConfig c = parse_config(
      "model.type = brown-resnick\ncontrol.method = auto\n", Command::simulate);
  CHECK_FALSE(c.control.method.has_value());
}

TEST_CASE("per command invariants") {
  CHECK(mentions(parse_errors("theta.lags = 1 -2\n", Command::theta),
                 "theta.lags must be positive"));
  CHECK(mentions(parse_errors("nu.lags = 0 0; 1 0\n", Command::nu_decay),
                 "nu.lags must be nonzero"));
  CHECK(mentions(parse_errors("nu.lags = 1 0 0\n", Command::nu_decay),
                 "nu.lags"));  // wrong arity for dim 2
  CHECK(mentions(parse_errors("clt.lengths = 4 4\ngrid.delta = 0.5\n", Command::clt),
                 "strictly increasing"));
  CHECK(mentions(parse_errors("grid.delta = 0.3\n", Command::clt),
                 "grid.delta must divide 1"));
  CHECK(mentions(parse_errors("clt.functional = threshold\nclt.u = 2\ngrid.delta = 1\n",
                              Command::clt),
                 "does not apply to functional 'threshold'"));
  CHECK(mentions(parse_errors("clt.sigma2_n = 10\ngrid.delta = 1\n", Command::clt),
                 "clt.sigma2_n must be >= 100"));
  CHECK(mentions(parse_errors("grid.delta = 0.3\ngrid.extent = 10\n",
                              Command::simulate),
                 "grid.delta must divide grid.extent"));
  CHECK(mentions(parse_errors("risk.levels = 0.5 1.5\ngrid.delta = 0.5\n",
                              Command::risk),
                 "risk levels must lie in (0, 1)"));
  CHECK(mentions(parse_errors("control.replicates = 0\n", Command::simulate),
                 "control.replicates must be >= 1"));
}

TEST_CASE("risk replicates ride the shared control knob") {
  const ExperimentConfig c = parse_config(
      "control.replicates = 321\ngrid.delta = 0.5\n", Command::risk);
  CHECK(c.risk.replicates == 321);
}
