#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "maxstab/errors.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/io.hpp"
#include "maxstab/rng.hpp"

using namespace maxstab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() / "maxstab_test_io";
  fs::create_directories(p);
  return p;
}

GridSpec grid2(long n, double delta) {
  GridSpec g;
  g.dim = 2;
  g.delta = delta;
  g.counts = {n, n, 1};
  return g;
}

}  // namespace

TEST_CASE("grid indexing round trip") {
  GridSpec g;
  g.dim = 3;
  g.delta = 0.5;
  g.counts = {3, 4, 5};
  g.origin = {1.0, -2.0, 0.0};
  g.validate();
  CHECK(g.size() == 60);
  CHECK(g.cell_volume() == doctest::Approx(0.125));
  for (std::size_t i = 0; i < g.size(); ++i) {
    long ijk[3];
    g.unflatten(i, ijk);
    CHECK(g.flatten(ijk) == i);
  }
  double x[3];
  g.site(0, x);
  CHECK(x[0] == doctest::Approx(1.25));
  CHECK(x[1] == doctest::Approx(-1.75));
  const SiteSet s = g.sites();
  CHECK(s.size() == 60);
  CHECK(s.dim == 3);
}

TEST_CASE("window_in_box half-open membership") {
  const GridSpec g = grid2(8, 0.5);  // sites at 0.25, 0.75, ..., 3.75

  Box v = Box::cube(2, 4.0);
  GridWindow w = window_in_box(g, v);
  CHECK(w.lo[0] == 0);
  CHECK(w.hi[0] == 7);
  CHECK(w.lo[2] == 0);
  CHECK(w.hi[2] == 0);

  v.lo = {1.0, 0.5, 0.0};
  v.hi = {3.0, 2.0, 0.0};
  w = window_in_box(g, v);
  CHECK(w.lo[0] == 2);  // first site >= 1.0 is 1.25
  CHECK(w.hi[0] == 5);  // last site < 3.0 is 2.75
  CHECK(w.lo[1] == 1);
  CHECK(w.hi[1] == 3);

  // Upper face exactly on a midpoint: half-open, excluded.
  v.lo = {0.0, 0.0, 0.0};
  v.hi = {1.25, 1.25, 0.0};
  w = window_in_box(g, v);
  CHECK(w.hi[0] == 1);

  GridSpec g3;
  g3.dim = 1;
  Box v3 = Box::cube(2, 1.0);
  CHECK_THROWS_AS(window_in_box(g3, v3), input_error);
}

TEST_CASE("field binary round trip is bit exact") {
  const fs::path dir = temp_dir();
  const GridSpec g = grid2(5, 0.25);
  FieldRealization f;
  f.grid = g;
  f.seed = 123456789;
  f.replicate = 42;
  f.model_tag = "smith dim=2";
  f.info.method = SimMethod::br_threshold;
  f.info.spectral_draws = 77;
  f.info.stopped_exactly = false;
  f.info.truncation_bound = 1.25e-9;
  f.info.threshold_bound = 31.5;
  f.info.threshold_quantile = 0.999;
  f.info.bias_possible = true;
  RngStream rng(9, 1);
  for (std::size_t i = 0; i < g.size(); ++i)
    f.values.push_back(std::exp(8.0 * rng.normal()));

  const fs::path path = dir / "roundtrip.bin";
  write_field(path, f);
  const FieldRealization r = read_field(path);
  CHECK(r.grid == f.grid);
  CHECK(r.seed == f.seed);
  CHECK(r.replicate == f.replicate);
  CHECK(r.model_tag == f.model_tag);
  CHECK(r.info.method == f.info.method);
  CHECK(r.info.spectral_draws == f.info.spectral_draws);
  CHECK(r.info.stopped_exactly == f.info.stopped_exactly);
  CHECK(r.info.truncation_bound == f.info.truncation_bound);
  CHECK(r.info.threshold_bound == f.info.threshold_bound);
  CHECK(r.info.bias_possible == f.info.bias_possible);
  REQUIRE(r.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(r.values[i] == f.values[i]);  // bitwise, no tolerance

  // Same bytes on disk when written twice.
  const fs::path path2 = dir / "roundtrip2.bin";
  write_field(path2, f);
  CHECK(sha256_file(path) == sha256_file(path2));
}

TEST_CASE("field reader rejects corrupted input") {
  const fs::path dir = temp_dir();
  const fs::path path = dir / "corrupt.bin";
  std::ofstream(path, std::ios::binary) << "NOPE this is not a field file";
  CHECK_THROWS_AS(read_field(path), io_error);
  CHECK_THROWS_AS(read_field(dir / "missing.bin"), io_error);
}

TEST_CASE("sha256 known vectors") {
  const std::string abc = "abc";
  CHECK(sha256_hex({reinterpret_cast<const unsigned char*>(abc.data()),
                    abc.size()}) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex({}) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  const fs::path dir = temp_dir();
  const fs::path path = dir / "abc.txt";
  write_text(path, abc);
  CHECK(sha256_file(path) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv output") {
  const fs::path dir = temp_dir();
  const fs::path path = dir / "table.csv";
  write_csv(path, {"a", "b"}, {{1.0, 0.1}, {2.0, 1.0 / 3.0}});
  const std::string text = read_text(path);
  CHECK(text.find("a,b\n") == 0);
  CHECK(text.find("0.1") != std::string::npos);
  // %.17g keeps the exact double
  const double third = 1.0 / 3.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", third);
  CHECK(text.find(buf) != std::string::npos);

  CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{1.0}}), input_error);
}

TEST_CASE("format_double survives parse round trip") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 2.5}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
}
