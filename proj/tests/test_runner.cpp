#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "maxstab/io.hpp"
#include "maxstab/runner.hpp"

using namespace maxstab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "maxstab_runner_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

fs::path write_cfg(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / "maxstab_runner_tests" / name;
  fs::create_directories(p.parent_path());
  write_text(p, text);
  return p;
}

int run(Command cmd, const fs::path& cfg, const fs::path& out,
        bool reproducible = false, long threads = -1) {
  RunOptions o;
  o.command = cmd;
  o.config_path = cfg;
  o.out_dir = out;
  o.reproducible = reproducible;
  o.threads_override = threads;
  return run_experiment(o);
}

constexpr const char* kTinySim =
    "grid.extent = 2\n"
    "grid.delta = 0.5\n"
    "control.replicates = 3\n"
    "control.seed = 11\n"
    "control.threads = 1\n";

json load_json(const fs::path& p) { return json::parse(read_text(p)); }

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(MAXSTAB_BIN) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("manifest lists exactly what was written") {
  const fs::path cfg = write_cfg("sim.cfg", kTinySim);
  const fs::path out = fresh_dir("sim_manifest");
  REQUIRE(run(Command::simulate, cfg, out) == 0);

  const json m = load_json(out / "manifest.json");
  CHECK(m.at("schema_version") == 1);
  CHECK(m.at("command") == "simulate");
  CHECK(m.at("seed") == 11);
  CHECK(m.at("reproducible") == false);
  CHECK(m.contains("timestamp"));

  std::vector<std::string> paths;
  std::set<std::string> listed;
  for (const json& a : m.at("artifacts")) {
    const std::string rel = a.at("path");
    paths.push_back(rel);
    listed.insert(rel);
    CHECK(sha256_file(out / rel) == a.at("sha256"));
    CHECK(fs::file_size(out / rel) == a.at("bytes").get<std::uintmax_t>());
  }
  CHECK(std::is_sorted(paths.begin(), paths.end()));

  std::set<std::string> walked;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file()) {
      const std::string rel = fs::relative(e.path(), out).generic_string();
      if (rel != "manifest.json") walked.insert(rel);
    }
  CHECK(walked == listed);
  CHECK(listed.count("report.json") == 1);
  CHECK(listed.count("config_resolved.cfg") == 1);
  CHECK(listed.count("fields/field_00000.bin") == 1);
  CHECK(listed.count("fields/field_00002.bin") == 1);
}

TEST_CASE("reproducible runs are byte identical") {
  const fs::path cfg = write_cfg("sim.cfg", kTinySim);
  const fs::path a = fresh_dir("repro_a");
  const fs::path b = fresh_dir("repro_b");
  REQUIRE(run(Command::simulate, cfg, a, true) == 0);
  REQUIRE(run(Command::simulate, cfg, b, true) == 0);
  // Manifests hash every artifact, so equal manifests mean equal trees.
  CHECK(read_text(a / "manifest.json") == read_text(b / "manifest.json"));
  CHECK_FALSE(load_json(a / "manifest.json").contains("timestamp"));
}

TEST_CASE("every command runs end to end") {
  struct Row {
    Command cmd;
    const char* name;
    const char* text;
  };
  const Row rows[] = {
      {Command::theta, "theta",
       "theta.lags = 1\ncontrol.replicates = 200\ncontrol.threads = 1\n"},
      {Command::nu_decay, "nu",
       "nu.lags = 1 0; 0 1\ngrid.delta = 1\ncontrol.replicates = 150\n"
       "control.threads = 1\n"},
      {Command::clt, "clt",
       "clt.lengths = 2 4\ngrid.delta = 1\ncontrol.replicates = 200\n"
       "clt.sigma2_n = 100\nclt.sigma2_max_radius = 1\nclt.cubes_max_window = 1\n"
       "control.seed = 5\ncontrol.threads = 1\n"},
      {Command::risk, "risk",
       "risk.lengths = 2 4\nrisk.levels = 0.9\nrisk.synthetic = true\n"
       "risk.sigma2_n = 100\nrisk.sigma2_max_radius = 1\ngrid.delta = 0.5\n"
       "control.replicates = 150\ncontrol.threads = 1\n"},
  };
  for (const Row& r : rows) {
    CAPTURE(r.name);
    const fs::path cfg = write_cfg(std::string(r.name) + ".cfg", r.text);
    const fs::path out = fresh_dir(std::string("cmd_") + r.name);
    CHECK(run(r.cmd, cfg, out) == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "config_resolved.cfg"));
  }
}

TEST_CASE("config problems exit 2 with a typed error file") {
  const fs::path cfg = write_cfg("bad.cfg", "fred = 1\ngrid.delta = -2\n");
  const fs::path out = fresh_dir("bad_cfg");
  CHECK(run(Command::simulate, cfg, out) == 2);
  const json e = load_json(out / "error.json");
  CHECK(e.at("type") == "config");
  CHECK(e.at("exit") == 2);
  const std::string msg = e.at("message");
  CHECK(msg.find("unknown or misplaced key 'fred'") != std::string::npos);
}

TEST_CASE("a truncated spectral budget exits 3") {
  const fs::path cfg = write_cfg(
      "budget.cfg",
      "model.type = brown-resnick\ngrid.extent = 2\ngrid.delta = 0.5\n"
      "control.replicates = 2\ncontrol.max_spectral_draws = 2\n"
      "control.pilot_draws = 10\ncontrol.threads = 1\n");
  const fs::path out = fresh_dir("budget");
  CHECK(run(Command::simulate, cfg, out) == 3);
  const json e = load_json(out / "error.json");
  CHECK(e.at("type") == "simulation");
  CHECK(e.at("exit") == 3);
}

TEST_CASE("an unwritable output directory exits 4") {
  const fs::path block =
      fs::temp_directory_path() / "maxstab_runner_tests" / "blocker";
  fs::create_directories(block.parent_path());
  write_text(block, "in the way\n");
  const fs::path cfg = write_cfg("sim.cfg", kTinySim);
  CHECK(run(Command::simulate, cfg, block / "sub") == 4);
}

TEST_CASE("a thread override lands in the resolved config") {
  const fs::path cfg = write_cfg("sim.cfg", kTinySim);
  const fs::path out = fresh_dir("threads");
  REQUIRE(run(Command::simulate, cfg, out, false, 2) == 0);
  const std::string resolved = read_text(out / "config_resolved.cfg");
  CHECK(resolved.find("control.threads = 2") != std::string::npos);
}

TEST_CASE("command line entry point") {
  const fs::path cfg = write_cfg("sim.cfg", kTinySim);
  const fs::path out = fresh_dir("cli_run");
  CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string() +
                " --reproducible") == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("simulate --help") == 0);
  CHECK(run_cli("") == 2);                    // a subcommand is required
  CHECK(run_cli("simulate --bogus") == 2);    // unknown flag
  CHECK(run_cli("simulate --config /nonexistent.cfg --out " +
                fresh_dir("cli_missing").string()) == 2);
}
