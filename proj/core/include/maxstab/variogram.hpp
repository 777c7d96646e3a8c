#pragma once

#include <cmath>

#include "maxstab/errors.hpp"

namespace maxstab {

// gamma(h) = eta * |h|^alpha. The alpha = 2 boundary is admitted; the induced
// Gaussian field degenerates to a linear form there and the covariance matrix
// becomes rank-deficient, which the sampler absorbs via diagonal jitter.
struct PowerVariogram {
  double eta = 1.0;
  double alpha = 1.0;

  bool operator==(const PowerVariogram&) const = default;

  void validate() const {
    if (!(eta > 0.0)) throw input_error("PowerVariogram: eta must be > 0");
    if (!(alpha > 0.0) || alpha > 2.0)
      throw input_error("PowerVariogram: alpha must lie in (0, 2]");
  }

  double operator()(const double* h, int dim) const {
    double q = 0.0;
    for (int k = 0; k < dim; ++k) q += h[k] * h[k];
    if (q == 0.0) return 0.0;
    if (alpha == 2.0) return eta * q;
    if (alpha == 1.0) return eta * std::sqrt(q);
    return eta * std::pow(q, 0.5 * alpha);
  }

  double from_sq_norm(double q) const {
    if (q == 0.0) return 0.0;
    if (alpha == 2.0) return eta * q;
    if (alpha == 1.0) return eta * std::sqrt(q);
    return eta * std::pow(q, 0.5 * alpha);
  }
};

// Covariance of the fractional Brownian field pinned to W(root) = 0:
// C(x, y) = (gamma(x - r) + gamma(y - r) - gamma(x - y)) / 2.
inline double fbf_covariance(const PowerVariogram& v, const double* x, const double* y,
                             const double* root, int dim) {
  double hx[3], hy[3], hxy[3];
  for (int k = 0; k < dim; ++k) {
    hx[k] = x[k] - root[k];
    hy[k] = y[k] - root[k];
    hxy[k] = x[k] - y[k];
  }
  return 0.5 * (v(hx, dim) + v(hy, dim) - v(hxy, dim));
}

}  // namespace maxstab
