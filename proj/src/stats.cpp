#include "fragchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/special_functions/gamma.hpp>

#include "fragchain/io.hpp"

namespace fragchain {

namespace {

void require_finite(std::span<const double> xs, const char* what) {
  for (double v : xs)
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": degenerate sample (non-finite value)");
}

void require_size(std::size_t n, const char* what) {
  if (n < 30) throw DomainError(std::string(what) + ": need at least 30 observations");
}

double stephens_p_value(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate est;
  est.n = values.size();
  if (values.empty()) return est;
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  est.mean = mean;
  if (k > 1) est.std_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
  return est;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_statistic(std::span<const double> a, const std::function<double(double)>& cdf) {
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

TestReport ks_test(std::span<const double> a, std::span<const double> b, double level) {
  require_size(a.size(), "ks_test");
  require_size(b.size(), "ks_test");
  require_finite(a, "ks_test");
  require_finite(b, "ks_test");
  TestReport r;
  r.statistic = ks_statistic(a, b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  r.p_value = stephens_p_value(r.statistic, na * nb / (na + nb));
  r.tolerance = level;
  r.pass = r.p_value >= level;
  r.n1 = a.size();
  r.n2 = b.size();
  return r;
}

TestReport ks_test(std::span<const double> a, const std::function<double(double)>& cdf, double level) {
  require_size(a.size(), "ks_test");
  require_finite(a, "ks_test");
  TestReport r;
  r.statistic = ks_statistic(a, cdf);
  r.p_value = stephens_p_value(r.statistic, static_cast<double>(a.size()));
  r.tolerance = level;
  r.pass = r.p_value >= level;
  r.n1 = a.size();
  return r;
}

TestReport chi2_test(std::span<const double> counts, std::span<const double> expected, double level,
                     std::size_t fitted_params) {
  if (counts.size() != expected.size() || counts.size() < 2)
    throw DomainError("chi2_test: need matching count vectors with at least two bins");
  if (counts.size() <= 1 + fitted_params) throw DomainError("chi2_test: no degrees of freedom left");
  double stat = 0.0, total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(expected[i] > 0.0)) throw DomainError("chi2_test: expected counts must be positive");
    const double d = counts[i] - expected[i];
    stat += d * d / expected[i];
    total += counts[i];
  }
  TestReport r;
  r.statistic = stat;
  const double df = static_cast<double>(counts.size() - 1 - fitted_params);
  r.p_value = boost::math::gamma_q(0.5 * df, 0.5 * stat);
  r.tolerance = level;
  r.pass = r.p_value >= level;
  r.n1 = static_cast<std::size_t>(total);
  return r;
}

TestReport chi2_homogeneity(std::span<const double> counts_a, std::span<const double> counts_b,
                            double level) {
  if (counts_a.size() != counts_b.size()) throw DomainError("chi2_homogeneity: bin count mismatch");
  const double na = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
  const double nb = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
  if (na <= 0.0 || nb <= 0.0) throw DomainError("chi2_homogeneity: empty sample");
  double stat = 0.0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    const double row = counts_a[i] + counts_b[i];
    if (row == 0.0) continue;
    ++bins;
    const double ea = row * na / (na + nb), eb = row * nb / (na + nb);
    stat += (counts_a[i] - ea) * (counts_a[i] - ea) / ea + (counts_b[i] - eb) * (counts_b[i] - eb) / eb;
  }
  if (bins < 2) throw DomainError("chi2_homogeneity: need at least two occupied bins");
  TestReport r;
  r.statistic = stat;
  r.p_value = boost::math::gamma_q(0.5 * static_cast<double>(bins - 1), 0.5 * stat);
  r.tolerance = level;
  r.pass = r.p_value >= level;
  r.n1 = static_cast<std::size_t>(na);
  r.n2 = static_cast<std::size_t>(nb);
  return r;
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0, s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

std::vector<double> resample_weighted(std::span<const double> values, std::span<const double> weights,
                                      RngStream& rng, std::size_t max_size) {
  if (values.size() != weights.size()) throw DomainError("resample_weighted: size mismatch");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("resample_weighted: invalid weight");
  const auto size = std::min<std::size_t>(max_size, static_cast<std::size_t>(std::floor(effective_sample_size(weights))));
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.empty() ? 0.0 : cumulative.back();
  if (!(total > 0.0)) throw DomainError("resample_weighted: zero total weight");
  std::vector<double> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.push_back(values[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  return out;
}

TestReport weighted_ks_test(std::span<const double> values, std::span<const double> weights,
                            const std::function<double(double)>& cdf, RngStream& rng,
                            double max_distance) {
  const auto pseudo = resample_weighted(values, weights, rng);
  TestReport r = ks_test(pseudo, cdf, 0.0);
  r.tolerance = max_distance;
  r.pass = r.statistic < max_distance;
  r.note = "weight-proportional resampling, n = effective sample size";
  return r;
}

void write_report_csv(std::ostream& os, std::span<const TestReport> reports) {
  os << "criterion_id,statistic,expected,tolerance,p_value,pass\n";
  for (const auto& r : reports)
    os << r.criterion << ',' << format_double(r.statistic) << ',' << format_double(r.expected) << ','
       << format_double(r.tolerance) << ',' << format_double(r.p_value) << ',' << (r.pass ? "true" : "false")
       << '\n';
}

}  // namespace fragchain
