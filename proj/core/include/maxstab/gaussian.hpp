#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "maxstab/grid.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/variogram.hpp"

namespace maxstab {

// Lower-triangular factor stored as contiguous rows; row i has i+1 entries.
// Row-major packing keeps the per-row dot products of the lazy field
// evaluations on sequential memory.
struct PackedCholesky {
  std::size_t n = 0;
  std::vector<double> rows;
  double jitter = 0.0;
  int attempts = 1;

  const double* row(std::size_t i) const { return rows.data() + i * (i + 1) / 2; }
};

// Factorizes a symmetric PSD matrix, escalating diagonal jitter
// 0 -> 1e-12 -> 1e-10 -> 1e-8 (scaled by max(1, max diagonal)) before giving
// up. The matrix is destroyed.
PackedCholesky cholesky_with_jitter(Eigen::MatrixXd& c);

struct GaussianSample {
  SiteSet sites;
  std::vector<double> values;
  double jitter = 0.0;
  int factor_attempts = 1;
};

// Samples the intrinsic Gaussian field with stationary increments and
// variogram gamma(h) = eta |h|^alpha, pinned to zero at `root`. Duplicate
// sites receive identical values; a site equal to the root gets exactly 0.
class FbfSampler {
 public:
  FbfSampler(PowerVariogram v, SiteSet sites,
             std::array<double, 3> root = {0.0, 0.0, 0.0});

  // One field draw; the stream advances by unique_sites() normals.
  std::vector<double> sample(RngStream& g) const;
  // Allocation-free variant for draw loops; `normals` is reusable scratch.
  void sample(RngStream& g, std::vector<double>& out,
              std::vector<double>& normals) const;

  std::size_t unique_sites() const { return factor_.n; }
  const PackedCholesky& factor() const { return factor_; }

 private:
  SiteSet sites_;
  std::vector<long> map_;  // input index -> factor row, -1 pins to the root
  PackedCholesky factor_;
};

GaussianSample sample_fbf(const PowerVariogram& v, const SiteSet& sites,
                          std::uint64_t seed);

}  // namespace maxstab
