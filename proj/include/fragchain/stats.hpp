#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fragchain/core.hpp"

namespace fragchain {

/// Outcome of one statistical or deterministic check.
struct TestReport {
  std::string criterion;
  double statistic = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  /// NaN for checks without a sampling distribution.
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::string note;
};

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

/// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// sup |F_a - F_b| between two empirical distributions.
double ks_statistic(std::span<const double> a, std::span<const double> b);
/// sup |F_a - cdf|.
double ks_statistic(std::span<const double> a, const std::function<double(double)>& cdf);

/// Two-sample KS test with the asymptotic p-value (Stephens' small-sample
/// correction). Passes when p >= level. Needs at least 30 points per side.
TestReport ks_test(std::span<const double> a, std::span<const double> b, double level = 0.01);
TestReport ks_test(std::span<const double> a, const std::function<double(double)>& cdf,
                   double level = 0.01);

/// Pearson goodness of fit; df = bins - 1 - fitted_params.
TestReport chi2_test(std::span<const double> counts, std::span<const double> expected,
                     double level = 0.01, std::size_t fitted_params = 0);
/// Pearson test that two count vectors share one distribution.
TestReport chi2_homogeneity(std::span<const double> counts_a, std::span<const double> counts_b,
                            double level = 0.01);

/// Kish effective sample size (Σw)² / Σw².
double effective_sample_size(std::span<const double> weights);

/// Weight-proportional resampling to an unweighted pseudo-sample whose size
/// is the effective sample size (capped at max_size).
std::vector<double> resample_weighted(std::span<const double> values, std::span<const double> weights,
                                      RngStream& rng, std::size_t max_size = 1'000'000);

/// KS distance of a weighted sample to a CDF through resample_weighted.
TestReport weighted_ks_test(std::span<const double> values, std::span<const double> weights,
                            const std::function<double(double)>& cdf, RngStream& rng,
                            double max_distance);

/// criterion_id,statistic,expected,tolerance,p_value,pass
void write_report_csv(std::ostream& os, std::span<const TestReport> reports);

}  // namespace fragchain
