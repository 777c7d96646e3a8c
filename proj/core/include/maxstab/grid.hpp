#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maxstab/errors.hpp"

namespace maxstab {

// Flat list of d-dimensional sites, row-major coordinates.
struct SiteSet {
  int dim = 2;
  std::vector<double> coords;  // size() * dim doubles

  std::size_t size() const { return coords.size() / static_cast<std::size_t>(dim); }
  const double* site(std::size_t i) const {
    return coords.data() + i * static_cast<std::size_t>(dim);
  }
  void push(const double* p) { coords.insert(coords.end(), p, p + dim); }
  void validate() const;
};

// Regular lattice of integration cells over [origin, origin + counts*delta].
// Sites sit at cell midpoints origin + (i + 1/2)*delta, enumerated row-major
// with the last axis fastest, so site k is also the k-th cell of the tiling.
struct GridSpec {
  int dim = 2;
  std::array<double, 3> origin = {0.0, 0.0, 0.0};
  double delta = 0.1;
  std::array<long, 3> counts = {1, 1, 1};

  void validate() const;
  std::size_t size() const {
    std::size_t n = 1;
    for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(counts[k]);
    return n;
  }
  double cell_volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= delta;
    return v;
  }
  double extent(int axis) const { return static_cast<double>(counts[axis]) * delta; }

  void unflatten(std::size_t idx, long* ijk) const {
    for (int k = dim - 1; k >= 0; --k) {
      ijk[k] = static_cast<long>(idx % static_cast<std::size_t>(counts[k]));
      idx /= static_cast<std::size_t>(counts[k]);
    }
  }
  std::size_t flatten(const long* ijk) const {
    std::size_t idx = 0;
    for (int k = 0; k < dim; ++k)
      idx = idx * static_cast<std::size_t>(counts[k]) + static_cast<std::size_t>(ijk[k]);
    return idx;
  }
  void site(std::size_t idx, double* out) const {
    long ijk[3];
    unflatten(idx, ijk);
    for (int k = 0; k < dim; ++k)
      out[k] = origin[k] + (static_cast<double>(ijk[k]) + 0.5) * delta;
  }
  SiteSet sites() const;

  bool operator==(const GridSpec&) const = default;
};

// Axis-aligned box, used for observation regions V_n.
struct Box {
  int dim = 2;
  std::array<double, 3> lo = {0.0, 0.0, 0.0};
  std::array<double, 3> hi = {1.0, 1.0, 1.0};

  void validate() const;
  double volume() const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
    return v;
  }
  static Box cube(int dim, double length) {
    Box b;
    b.dim = dim;
    for (int k = 0; k < dim; ++k) {
      b.lo[k] = 0.0;
      b.hi[k] = length;
    }
    return b;
  }
};

// Inclusive per-axis index ranges of the sites inside [v.lo, v.hi), half
// open. Aligned box faces never coincide with site midpoints; the built-in
// 1e-12 slack only absorbs representation fuzz. Axes at and above the
// dimension collapse to [0, 0] so flat row-major loops stay uniform.
struct GridWindow {
  std::array<long, 3> lo = {0, 0, 0};
  std::array<long, 3> hi = {-1, -1, -1};
};

GridWindow window_in_box(const GridSpec& g, const Box& v);

enum class SimMethod { smith_exact, br_threshold, br_extremal };
std::string to_string(SimMethod m);

// Per-realization diagnostics attached by the samplers.
struct SimulationInfo {
  SimMethod method = SimMethod::smith_exact;
  long spectral_draws = 0;      // storms or spectral fields consumed
  bool stopped_exactly = true;  // false only when the draw cap truncated work
  double truncation_bound = 0.0;  // documented per-site error bound (Smith)
  double threshold_bound = 0.0;   // pilot bound B_q (threshold method)
  double threshold_quantile = 0.0;
  bool bias_possible = false;  // true for the threshold method
};

// One simulated field on a grid; values are strictly positive.
struct FieldRealization {
  GridSpec grid;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::string model_tag;
  SimulationInfo info;

  void validate() const;
};

// Output of the marginal transform ln(Z); values are unconstrained reals.
struct RealField {
  GridSpec grid;
  std::vector<double> values;
};

}  // namespace maxstab
