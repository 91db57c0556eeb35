#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fragchain/engine.hpp"
#include "fragchain/stats.hpp"

namespace fragchain {

/// Atoms (log-size, weight) of the weighted log-empirical measure of X(t)
/// for one replica, weight = size^p.
struct WeightedEmpirical {
  std::vector<double> log_sizes;
  std::vector<double> weights;
  double time = 0.0;
  std::size_t replica = 0;

  double total_weight() const;
};

/// Builds the weighted empirical measure of X(t) from a log.
///
/// With `continuation` set (homogeneous logs only), every screened fragment
/// x born before t is carried to t along one tagged lineage χ and enters as
/// an atom of size x·χ with multiplicity 1/χ. This keeps Σ F(X_i(t))
/// unbiased for every F while the screen keeps the event count bounded.
WeightedEmpirical weighted_empirical(const EventLog& log, double t, double p,
                                     const DislocationLaw* continuation_law = nullptr,
                                     RngStream* continuation = nullptr);

/// Same, for replica `replica` of cfg (run to horizon t).
WeightedEmpirical weighted_empirical(const SimConfig& cfg, std::size_t replica, double t, double p);

/// Mean over replicas of Σ X_i^{p*} f(t^{-1} ln X_i(t)). Requires alpha = 0.
MeanEstimate lln_functional(const SimConfig& cfg, double t, const std::function<double(double)>& f);

/// The identity clamped to [-3, 0].
double clamped_identity(double x);

struct CltEstimate {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t replicas = 0;
};

/// Weighted mean and variance of (ln X_i(t) + κ'(p*) t)/√t, pooled over
/// replicas. Requires alpha = 0 and a non-geometric law.
CltEstimate clt_functional(const SimConfig& cfg, double t);

/// E[Σ X_i^{p*}(t) (t^{1/α} X_i(t))^{αk}]. Requires alpha > 0, non-geometric law.
MeanEstimate scaled_moment(const SimConfig& cfg, double t, std::size_t k);

/// Mean over replicas of t^{-1} ln X_1(t). Requires alpha = 0, c = 0, a
/// conservative law and ln ε < -κ'(p̄) t - 5 so that X_1 is never screened.
MeanEstimate largest_rate(const SimConfig& cfg, double t);

/// Per-replica M(p, t) = e^{tκ(p)} Σ X_i^p(t) on a time grid; result[r][j]
/// belongs to replica r at times[j]. Requires alpha = 0, c = 0 and a
/// conservative law.
std::vector<std::vector<double>> additive_martingale(const SimConfig& cfg, double p,
                                                     std::span<const double> times);

}  // namespace fragchain
