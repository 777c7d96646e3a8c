#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace maxstab {

double normal_pdf(double x);
double normal_cdf(double x);
// Acklam initial guess refined by one Halley step against erfc; good to ~1e-15.
double normal_quantile(double p);

// Compensated (Neumaier) accumulation; used wherever exact-partition algebra
// between differently grouped sums is asserted at 1e-12.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double ex_kurtosis = 0.0;
  std::size_t n = 0;
};
Moments sample_moments(std::span<const double> x);

struct GofTest {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample tests against a fully specified continuous null. `u` must hold
// the null CDF evaluated at the samples; it is sorted in place.
GofTest kolmogorov_smirnov(std::vector<double>& u);
GofTest anderson_darling(std::vector<double>& u);

// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_tail(double lambda);
// Marsaglia & Marsaglia asymptotic CDF of the Anderson-Darling statistic.
double anderson_darling_cdf(double z);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_se = 0.0;
  std::size_t n = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Type-7 empirical quantile (linear interpolation); x must be sorted.
double empirical_quantile(std::span<const double> x, double p);

}  // namespace maxstab
