#include "maxstab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "maxstab/errors.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

double normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw input_error("normal_quantile: p must be in (0,1)");
  double x = RngStream::normal_quantile_fast(p);
  // Halley refinement; one step takes the rational guess to machine accuracy.
  const double e = normal_cdf(x) - p;
  const double u = e * 2.5066282746310002 * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

Moments sample_moments(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw input_error("sample_moments: need at least 2 samples");
  NeumaierSum s;
  for (double v : x) s.add(v);
  const double mean = s.value() / static_cast<double>(n);
  NeumaierSum s2, s3, s4;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    s2.add(d2);
    s3.add(d2 * d);
    s4.add(d2 * d2);
  }
  const double m2 = s2.value() / static_cast<double>(n);
  Moments out;
  out.n = n;
  out.mean = mean;
  out.variance = s2.value() / static_cast<double>(n - 1);
  if (m2 > 0.0) {
    out.skewness = (s3.value() / static_cast<double>(n)) / std::pow(m2, 1.5);
    out.ex_kurtosis = (s4.value() / static_cast<double>(n)) / (m2 * m2) - 3.0;
  }
  return out;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 101; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofTest kolmogorov_smirnov(std::vector<double>& u) {
  const std::size_t n = u.size();
  if (n < 2) throw input_error("kolmogorov_smirnov: need at least 2 samples");
  std::sort(u.begin(), u.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fn_hi = static_cast<double>(i + 1) / static_cast<double>(n);
    const double fn_lo = static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, std::max(fn_hi - u[i], u[i] - fn_lo));
  }
  const double rn = std::sqrt(static_cast<double>(n));
  GofTest out;
  out.statistic = d;
  out.p_value = kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
  return out;
}

double anderson_darling_cdf(double z) {
  // Marsaglia & Marsaglia (2004) approximation of the limiting CDF.
  if (z <= 0.0) return 0.0;
  if (z < 2.0) {
    return std::exp(-1.2337141 / z) / std::sqrt(z) *
           (2.00012 +
            (0.247105 -
             (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) *
                z);
  }
  return std::exp(
      -std::exp(1.0776 -
                (2.30695 -
                 (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) *
                    z));
}

GofTest anderson_darling(std::vector<double>& u) {
  const std::size_t n = u.size();
  if (n < 2) throw input_error("anderson_darling: need at least 2 samples");
  std::sort(u.begin(), u.end());
  constexpr double eps = 1e-300;
  double a2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = std::clamp(u[i], eps, 1.0 - 1e-16);
    const double uj = std::clamp(u[n - 1 - i], eps, 1.0 - 1e-16);
    a2 += (2.0 * static_cast<double>(i) + 1.0) * (std::log(ui) + std::log1p(-uj));
  }
  a2 = -static_cast<double>(n) - a2 / static_cast<double>(n);
  GofTest out;
  out.statistic = a2;
  out.p_value = 1.0 - anderson_darling_cdf(a2);
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw input_error("fit_line: need matching x/y with n >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw input_error("fit_line: x values are all identical");
  LineFit out;
  out.n = n;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  const double ss_res = std::max(0.0, syy - out.slope * sxy);
  out.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (n > 2) out.slope_se = std::sqrt(ss_res / (static_cast<double>(n - 2) * sxx));
  return out;
}

double empirical_quantile(std::span<const double> x, double p) {
  const std::size_t n = x.size();
  if (n == 0) throw input_error("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw input_error("empirical_quantile: p outside [0,1]");
  if (n == 1) return x[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return x[n - 1];
  const double w = h - static_cast<double>(lo);
  return x[lo] * (1.0 - w) + x[lo + 1] * w;
}

}  // namespace maxstab
