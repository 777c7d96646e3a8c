#include "maxstab/grid.hpp"

#include <algorithm>
#include <cmath>

namespace maxstab {

void SiteSet::validate() const {
  if (dim < 1 || dim > 3) throw input_error("SiteSet: dim must be 1, 2 or 3");
  if (coords.empty() || coords.size() % static_cast<std::size_t>(dim) != 0)
    throw input_error("SiteSet: coordinate count is not a multiple of dim");
  for (double c : coords)
    if (!std::isfinite(c)) throw input_error("SiteSet: non-finite coordinate");
}

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw input_error("GridSpec: dim must be 1, 2 or 3");
  if (!(delta > 0.0)) throw input_error("GridSpec: delta must be > 0");
  for (int k = 0; k < dim; ++k) {
    if (counts[k] < 1) throw input_error("GridSpec: counts must be >= 1");
    if (!std::isfinite(origin[k])) throw input_error("GridSpec: non-finite origin");
  }
  if (size() > (1u << 24))
    throw input_error("GridSpec: more than 2^24 sites; check extent and delta");
}

SiteSet GridSpec::sites() const {
  SiteSet s;
  s.dim = dim;
  const std::size_t n = size();
  s.coords.resize(n * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) site(i, s.coords.data() + i * dim);
  return s;
}

void Box::validate() const {
  if (dim < 1 || dim > 3) throw input_error("Box: dim must be 1, 2 or 3");
  for (int k = 0; k < dim; ++k)
    if (!(hi[k] > lo[k])) throw input_error("Box: hi must exceed lo on every axis");
}

GridWindow window_in_box(const GridSpec& g, const Box& v) {
  if (g.dim != v.dim) throw input_error("window_in_box: dimension mismatch");
  GridWindow w;
  for (int k = 0; k < g.dim; ++k) {
    // Site midpoints x_i = origin + (i + 0.5) delta; keep v.lo <= x < v.hi.
    const double tlo = (v.lo[k] - g.origin[k]) / g.delta - 0.5;
    const double thi = (v.hi[k] - g.origin[k]) / g.delta - 0.5;
    w.lo[k] = std::max(static_cast<long>(std::ceil(tlo - 1e-12)), 0L);
    w.hi[k] = std::min(static_cast<long>(std::floor(thi - 1e-12)), g.counts[k] - 1);
  }
  for (int k = g.dim; k < 3; ++k) {
    w.lo[k] = 0;
    w.hi[k] = 0;
  }
  return w;
}

std::string to_string(SimMethod m) {
  switch (m) {
    case SimMethod::smith_exact: return "smith-exact";
    case SimMethod::br_threshold: return "br-threshold";
    case SimMethod::br_extremal: return "br-extremal";
  }
  return "unknown";
}

void FieldRealization::validate() const {
  grid.validate();
  if (values.size() != grid.size())
    throw input_error("FieldRealization: value count does not match grid");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw input_error("FieldRealization: values must be finite and > 0");
}

}  // namespace maxstab
