#include "fragchain/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "fragchain/analytic.hpp"
#include "fragchain/cascade.hpp"
#include "fragchain/duality.hpp"
#include "fragchain/engine.hpp"
#include "fragchain/estimators.hpp"
#include "fragchain/partition.hpp"
#include "fragchain/tolerances.hpp"

namespace fragchain {

namespace {

using Reports = std::vector<TestReport>;

TestReport within(std::string id, double statistic, double expected, double tolerance) {
  TestReport r;
  r.criterion = std::move(id);
  r.statistic = statistic;
  r.expected = expected;
  r.tolerance = tolerance;
  r.pass = std::abs(statistic - expected) <= tolerance;
  return r;
}

TestReport in_range(std::string id, double statistic, double lo, double hi) {
  TestReport r = within(std::move(id), statistic, 0.5 * (lo + hi), 0.5 * (hi - lo));
  r.pass = statistic >= lo && statistic <= hi;
  return r;
}

TestReport within_se(std::string id, const MeanEstimate& est, double expected, double k) {
  TestReport r = within(std::move(id), est.mean, expected, k * est.std_error);
  r.n1 = est.n;
  r.note = "tolerance = " + std::to_string(k) + " standard errors";
  return r;
}

TestReport labelled(std::string id, TestReport r) {
  r.criterion = std::move(id);
  return r;
}

SimConfig base_config(LawPtr law, double alpha, std::uint64_t seed) {
  SimConfig c;
  c.law = std::move(law);
  c.alpha = alpha;
  c.seed = seed;
  return c;
}

template <class Fn>
std::vector<double> collect(std::size_t n, Fn fn) {
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

double sum_of_squares(const MassPartition& x) {
  double s = 0.0;
  for (double l : x.log_sizes()) s += std::exp(2.0 * l);
  return s;
}

// --- AC1 -----------------------------------------------------------------

Reports ac1(const SuiteOptions&) {
  struct Case {
    LawPtr law;
    std::function<double(double)> sigma;
  };
  const double r = 1.0 / 3.0;
  const std::vector<Case> cases = {
      {uniform_binary(), [](double p) { return 2.0 / (p + 1.0); }},
      {deterministic_binary(r), [r](double p) { return std::pow(r, p) + std::pow(1.0 - r, p); }},
      {lossy_binary(), [](double p) { return 2.0 * std::pow(2.0, -p) / (p + 1.0); }},
      {dirichlet_k(3), [](double p) { return 6.0 / ((p + 1.0) * (p + 2.0)); }},
  };
  Reports out;
  for (const auto& c : cases) {
    const KappaFunction kappa(c.law);
    double worst = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      worst = std::max(worst, std::abs(kappa(p) - (1.0 - c.sigma(p))));
      worst = std::max(worst, std::abs(sigma_moment(*c.law, p).value - c.sigma(p)));
    }
    out.push_back(within("AC1:" + c.law->name(), worst, 0.0, tol::kKappaClosedForm));
    if (c.law->metadata().conservative) {
      auto row = within("AC1:" + c.law->name() + ":kappa1", kappa(1.0), 0.0, 0.0);
      out.push_back(row);
    }
  }
  return out;
}

// --- AC2 -----------------------------------------------------------------

// Plain bisection on the hand-written lossy κ, kept apart from the library.
double lossy_root_oracle() {
  const auto k = [](double p) { return 1.0 - std::pow(2.0, 1.0 - p) / (p + 1.0); };
  double lo = 0.01, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (k(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Reports ac2(const SuiteOptions&) {
  Reports out;
  for (const auto& law : {uniform_binary(), deterministic_binary(1.0 / 3.0), dirichlet_k(3)})
    out.push_back(within("AC2:pstar:" + law->name(), KappaFunction(law).malthusian(), 1.0, 0.0));
  out.push_back(within("AC2:pstar:lossy_binary", KappaFunction(lossy_binary()).malthusian(),
                       lossy_root_oracle(), tol::kExponentRoot));
  const KappaFunction kappa(uniform_binary());
  const double pbar = kappa.p_bar();
  out.push_back(within("AC2:pbar", pbar, 1.0 + std::numbers::sqrt2, tol::kExponentRoot));
  out.push_back(within("AC2:pbar_tangent", kappa(pbar) / pbar - kappa.derivative(pbar, 1), 0.0,
                       tol::kExponentRoot));
  return out;
}

// --- AC3 -----------------------------------------------------------------

Reports ac3(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 3));
  cfg.horizon = 2.0;
  cfg.snapshot_times = {1.0, 2.0};
  cfg.replicas = tol::kHomogeneousReplicas;
  std::vector<double> m1(cfg.replicas), m2(cfg.replicas);
  parallel_for(cfg.replicas, [&](std::size_t r) {
    const auto log = run(cfg, r);
    m1[r] = sum_of_squares(log.snapshots()[0].fragments);
    m2[r] = sum_of_squares(log.snapshots()[1].fragments);
  });
  out.push_back(within_se("AC3:moment_t1", estimate_mean(m1), std::exp(-1.0 / 3.0), tol::kStdErrors));
  out.push_back(within_se("AC3:moment_t2", estimate_mean(m2), std::exp(-2.0 / 3.0), tol::kStdErrors));

  for (double c : {0.0, tol::kErosionRate}) {
    auto tagged = cfg;
    tagged.erosion = c;
    tagged.snapshot_times.clear();
    tagged.horizon = 3.0;
    const auto chi = collect(cfg.replicas, [&](std::size_t r) {
      RngStream rng(mix64(o.seed, c == 0.0 ? 31 : 32), r);
      return std::exp(tagged_path(tagged, 3.0, rng).log_at(3.0));
    });
    const double expected = std::exp(-3.0 * (c * 2.0 + 1.0 / 3.0));
    out.push_back(within_se(c == 0.0 ? "AC3:tagged" : "AC3:tagged_erosion", estimate_mean(chi), expected,
                            tol::kStdErrors));
  }
  return out;
}

// --- AC4 -----------------------------------------------------------------

Reports ac4(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 1.0, mix64(o.seed, 4));
  cfg.horizon = 4.0;
  cfg.replicas = tol::kSelfSimilarReplicas;
  const auto m = collect(cfg.replicas, [&](std::size_t r) { return sum_of_squares(run(cfg, r).fragments_at(4.0)); });
  out.push_back(within_se("AC4:moment_t4", estimate_mean(m), tol::kSelfSimilarMoment, tol::kStdErrors));

  const KappaFunction kappa(uniform_binary());
  double worst = 0.0;
  for (std::size_t i = 0; i < tol::kMomentSeriesGrid; ++i) {
    const double t = 10.0 * static_cast<double>(i) / static_cast<double>(tol::kMomentSeriesGrid - 1);
    const double closed = t == 0.0 ? 1.0 : 2.0 * (std::exp(-t) - 1.0 + t) / (t * t);
    worst = std::max(worst, std::abs(moment_series(kappa, 2.0, t, 1.0) - closed));
  }
  out.push_back(within("AC4:moment_series", worst, 0.0, tol::kMomentSeries));
  return out;
}

// --- AC5 -----------------------------------------------------------------

Reports ac5(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 1.0, mix64(o.seed, 5));
  cfg.mode = SimMode::threshold;
  cfg.epsilon = tol::kFilippovEpsilon;
  cfg.replicas = tol::kFilippovReplicas;
  const auto k1 = scaled_moment(cfg, tol::kFilippovTime, 1);
  auto row = in_range("AC5:scaled_k1", k1.mean, tol::kFilippovLow, tol::kFilippovHigh);
  row.n1 = k1.n;
  out.push_back(row);
  const double rho2 = rho_moments(KappaFunction(uniform_binary()), 1.0, 2).moments[1];
  const auto k2 = scaled_moment(cfg, tol::kFilippovTime, 2);
  row = within("AC5:scaled_k2", k2.mean, rho2, tol::kScaledMomentRel * rho2);
  row.n1 = k2.n;
  out.push_back(row);
  return out;
}

// --- AC6 -----------------------------------------------------------------

Reports ac6(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 6));
  cfg.mode = SimMode::threshold;
  cfg.epsilon = tol::kLlnEpsilon;
  cfg.replicas = tol::kLlnReplicas;
  const double speed = KappaFunction(uniform_binary()).derivative(1.0, 1);
  const double curvature = KappaFunction(uniform_binary()).derivative(1.0, 2);
  const auto lln = lln_functional(cfg, tol::kLlnTime, clamped_identity);
  auto row = within("AC6:lln_mean", lln.mean, -speed, tol::kLlnMean);
  row.n1 = lln.n;
  out.push_back(row);
  const auto clt = clt_functional(cfg, tol::kLlnTime);
  row = within("AC6:clt_variance", clt.variance, -curvature, tol::kCltVariance);
  row.n1 = clt.replicas;
  out.push_back(row);
  row = within("AC6:clt_mean", clt.mean, 0.0, tol::kCltMean);
  row.n1 = clt.replicas;
  out.push_back(row);
  return out;
}

// --- AC7 -----------------------------------------------------------------

Reports ac7(const SuiteOptions& o) {
  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 7));
  cfg.mode = SimMode::threshold;
  cfg.epsilon = tol::kLargestEpsilon;
  cfg.replicas = tol::kLargestReplicas;
  const auto est = largest_rate(cfg, tol::kLargestTime);
  auto row = within("AC7:largest_rate", est.mean, -(3.0 - 2.0 * std::numbers::sqrt2), tol::kLargestRate);
  row.n1 = est.n;
  row.note = "std_error " + std::to_string(est.std_error);
  return {row};
}

// --- AC8 -----------------------------------------------------------------

Reports ac8(const SuiteOptions& o) {
  Reports out;
  for (const auto& law : {uniform_binary(), deterministic_binary(1.0 / 3.0), dirichlet_k(3)}) {
    const auto tree = grow(*law, 0.0, static_cast<std::uint32_t>(tol::kMartingaleGenerations),
                           RngStream(mix64(o.seed, 8), 0));
    double worst = 0.0;
    const auto series = intrinsic_martingale(tree, 1.0);
    for (double v : series.values) worst = std::max(worst, std::abs(v - 1.0));
    auto row = within("AC8:unit_martingale:" + law->name(), worst, 0.0, tol::kMartingaleRounding);
    row.note = "floating-point rounding of an identity";
    out.push_back(row);
  }

  const auto lossy = lossy_binary();
  const double p_star = KappaFunction(lossy).malthusian();
  const auto m5 = collect(tol::kLossyTrees, [&](std::size_t r) {
    const auto tree = grow(*lossy, 0.0, static_cast<std::uint32_t>(tol::kLossyGeneration), RngStream(mix64(o.seed, 81), r));
    return intrinsic_martingale(tree, p_star).values.back();
  });
  out.push_back(within_se("AC8:lossy_mean", estimate_mean(m5), 1.0, tol::kLossyStdErrors));

  const auto direct = collect(tol::kFixedPointSamples, [&](std::size_t r) {
    const auto tree =
        grow(*lossy, 0.0, static_cast<std::uint32_t>(tol::kFixedPointGeneration), RngStream(mix64(o.seed, 82), r));
    return intrinsic_martingale(tree, p_star).values.back();
  });
  RngStream rng(mix64(o.seed, 83), 0);
  out.push_back(labelled("AC8:fixed_point", fixed_point_check(direct, *lossy, p_star, rng, tol::kFixedPointKs)));
  return out;
}

// --- AC9 -----------------------------------------------------------------

Reports ac9(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 9));
  const auto unit = CostSpec::unit(0.0);
  const auto scaled = collect(tol::kEnergyReplicas, [&](std::size_t r) {
    return tol::kEnergyEpsilon * energy_cost(cfg, unit, tol::kEnergyEpsilon, RngStream(cfg.seed, r));
  });
  const auto est = estimate_mean(scaled);
  auto row = in_range("AC9:energy_beta0", est.mean, tol::kEnergyLow, tol::kEnergyHigh);
  row.n1 = est.n;
  out.push_back(row);

  // β = 2: one screened run at the finest ε, read at every coarser ε.
  const std::vector<double> eps = {1e-2, 1e-3, 1e-4};
  const auto quadratic = CostSpec::unit(2.0);
  std::vector<std::vector<double>> by_eps(eps.size(), std::vector<double>(tol::kEnergyReplicas));
  auto fine = cfg;
  fine.mode = SimMode::threshold;
  fine.epsilon = eps.back();
  fine.horizon = kInf;
  parallel_for(tol::kEnergyReplicas, [&](std::size_t r) {
    const auto log = run(fine, RngStream(mix64(o.seed, 91), r));
    for (std::size_t k = 0; k < eps.size(); ++k) by_eps[k][r] = energy_cost(log, quadratic, eps[k]);
  });
  for (std::size_t k = 1; k < eps.size(); ++k) {
    const double prev = estimate_mean(by_eps[k - 1]).mean, cur = estimate_mean(by_eps[k]).mean;
    std::ostringstream id;
    id << "AC9:energy_beta2_step" << k;
    out.push_back(within(id.str(), std::abs(cur - prev) / cur, 0.0, tol::kEnergyStability));
  }
  return out;
}

// --- AC10 ----------------------------------------------------------------

Reports ac10(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 10));
  WeightedSample pooled;
  std::vector<double> totals(tol::kExitReplicas);
  for (std::size_t r = 0; r < tol::kExitReplicas; ++r) {
    auto s = exit_samples(cfg, tol::kExitEpsilon, 1.0, RngStream(cfg.seed, r));
    totals[r] = s.total_weight();
    pooled.values.insert(pooled.values.end(), s.values.begin(), s.values.end());
    pooled.weights.insert(pooled.weights.end(), s.weights.begin(), s.weights.end());
  }
  RngStream rng(mix64(o.seed, 101), 0);
  out.push_back(labelled("AC10:exit_ks", weighted_ks_test(pooled.values, pooled.weights,
                                                          [](double x) { return x * x; }, rng, tol::kExitKs)));
  const auto mean = estimate_mean(totals);
  auto row = within("AC10:total_weight", mean.mean, 1.0, tol::kExitTotalWeight);
  row.n1 = mean.n;
  out.push_back(row);
  return out;
}

// --- AC11 ----------------------------------------------------------------

Reports ac11(const SuiteOptions& o) {
  Reports out;
  const auto s = MassPartition::from_log_sizes({std::log(0.5), std::log(1.0 / 3.0)});
  RngStream rng(mix64(o.seed, 11), 0);
  const auto pi = paintbox(s, tol::kPaintboxN, rng);
  std::vector<double> block_sizes;
  double singletons = 0.0;
  for (const auto& b : pi.blocks()) {
    if (b.size() == 1)
      singletons += 1.0;
    else
      block_sizes.push_back(static_cast<double>(b.size()));
  }
  std::sort(block_sizes.rbegin(), block_sizes.rend());
  const double n = static_cast<double>(tol::kPaintboxN);
  double worst = 0.0;
  for (std::size_t k = 0; k < 2; ++k)
    worst = std::max(worst, std::abs((k < block_sizes.size() ? block_sizes[k] : 0.0) / n - s.size_at(k)));
  out.push_back(within("AC11:frequencies", worst, 0.0, tol::kPaintboxFrequency));
  out.push_back(within("AC11:singletons", singletons / n, 1.0 / 6.0, tol::kPaintboxFrequency));

  auto cfg = base_config(uniform_binary(), 0.0, mix64(o.seed, 111));
  cfg.horizon = 2.0;
  const std::vector<double> times = {0.5, 1.0, 2.0};
  double violations = 0.0;
  for (std::size_t r = 0; r < tol::kRefinementReplicas; ++r) {
    const auto path = partition_process(cfg, 50, times, RngStream(cfg.seed, r));
    for (std::size_t k = 1; k < path.size(); ++k)
      if (!path[k].refines(path[k - 1])) violations += 1.0;
  }
  out.push_back(within("AC11:refinement", violations, 0.0, 0.0));

  // Law of Π(1) restricted to {1,2,3}: the three two-block patterns must be
  // equally likely.
  std::vector<double> counts(3, 0.0);
  const std::vector<double> one = {1.0};
  for (std::size_t r = 0; r < tol::kExchangeabilityReplicas; ++r) {
    const auto p = partition_process(cfg, 3, one, RngStream(mix64(o.seed, 112), r)).front();
    if (p.blocks().size() != 2) continue;
    for (const auto& b : p.blocks())
      if (b.size() == 1) counts[b.front() - 1] += 1.0;
  }
  const double total = counts[0] + counts[1] + counts[2];
  const std::vector<double> expected(3, total / 3.0);
  out.push_back(labelled("AC11:exchangeability", chi2_test(counts, expected, tol::kChiSquareLevel)));
  return out;
}

// --- AC12 ----------------------------------------------------------------

Reports ac12(const SuiteOptions& o) {
  Reports out;
  auto homogeneous = base_config(uniform_binary(), 0.0, mix64(o.seed, 12));
  homogeneous.horizon = 1.0;
  auto direct = base_config(uniform_binary(), 1.0, mix64(o.seed, 121));
  direct.horizon = 1.0;
  // Self-similar clocks run at least as fast as the homogeneous one, so a
  // homogeneous history to time 1 covers the changed history at time 1.
  const auto changed = collect(tol::kTimeChangeSamples, [&](std::size_t r) {
    const auto g = IntervalFragmentation::from_event_log(run(homogeneous, r));
    return time_change(g, 1.0).ranked_at(1.0).size_at(0);
  });
  const auto simulated = collect(tol::kTimeChangeSamples,
                                 [&](std::size_t r) { return run(direct, r).fragments_at(1.0).size_at(0); });
  out.push_back(labelled("AC12:time_change_ks", ks_test(changed, simulated, tol::kKsLevel)));

  double mismatches = 0.0;
  for (std::size_t r = 0; r < 200; ++r) {
    const auto g = IntervalFragmentation::from_event_log(run(homogeneous, r));
    const auto h = time_change(g, 0.0);
    for (std::size_t i = 0; i < g.intervals().size(); ++i) {
      const auto &a = g.intervals()[i], &b = h.intervals()[i];
      if (a.left != b.left || a.right != b.right || a.birth != b.birth || a.death != b.death ||
          a.censor != b.censor || a.log_size != b.log_size)
        mismatches += 1.0;
    }
  }
  out.push_back(within("AC12:alpha0_identity", mismatches, 0.0, 0.0));
  return out;
}

// --- AC13 ----------------------------------------------------------------

Reports ac13(const SuiteOptions& o) {
  Reports out;
  auto cfg = base_config(uniform_binary(), -1.0, mix64(o.seed, 13));
  cfg.mode = SimMode::threshold;
  cfg.horizon = tol::kShatteringHorizon;
  cfg.epsilon = tol::kShatteringEpsilon;

  std::vector<double> zeta(tol::kShatteringPool);
  std::vector<double> dust_gap(tol::kShatteringReplicas);
  parallel_for(tol::kShatteringPool, [&](std::size_t r) {
    const auto log = run(cfg, r);
    zeta[r] = log.extinction_time().value_or(kInf);
    if (r < tol::kShatteringReplicas) dust_gap[r] = std::abs(log.dust_at(cfg.horizon) - 1.0);
  });
  const auto extinct = static_cast<double>(
      std::count_if(zeta.begin(), zeta.begin() + tol::kShatteringReplicas, [](double z) { return std::isfinite(z); }));
  out.push_back(within("AC13:extinct", extinct, static_cast<double>(tol::kShatteringReplicas), 0.0));

  auto coarse = cfg;
  coarse.epsilon = tol::kShatteringCoarseEpsilon;
  const auto zeta_coarse = collect(tol::kShatteringReplicas,
                                   [&](std::size_t r) { return run(coarse, r).extinction_time().value_or(kInf); });
  const double fine_mean =
      estimate_mean(std::span<const double>(zeta).first(tol::kShatteringReplicas)).mean;
  const double coarse_mean = estimate_mean(zeta_coarse).mean;
  out.push_back(within("AC13:zeta_stability", std::abs(coarse_mean - fine_mean) / fine_mean, 0.0,
                       tol::kShatteringStability));

  // ζ = e + max_j ξ_j^{-α} ζ'_j with ζ'_j drawn from the same pool.
  RngStream rng(mix64(o.seed, 131), 0);
  std::vector<double> recomposed(zeta.size());
  std::vector<double> logs;
  const double log_eps = std::log(cfg.epsilon);
  for (auto& z : recomposed) {
    const double e = rng.exponential();
    cfg.law->sample_log_ratios(rng, logs);
    double longest = 0.0;
    for (double l : logs) {
      const auto pick = std::min(zeta.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(zeta.size())));
      if (l > log_eps) longest = std::max(longest, std::exp(-cfg.alpha * l) * zeta[pick]);
    }
    z = e + longest;
  }
  auto ks = ks_test(zeta, recomposed, 0.0);
  ks.criterion = "AC13:fixed_point";
  ks.tolerance = tol::kShatteringKs;
  ks.pass = ks.statistic < tol::kShatteringKs;
  out.push_back(ks);

  out.push_back(within("AC13:dust_one", *std::max_element(dust_gap.begin(), dust_gap.end()), 0.0,
                       tol::kDustRounding));
  return out;
}

// --- AC14 ----------------------------------------------------------------

Reports ac14(const SuiteOptions& o) {
  Reports out;
  const auto grid = coalescent_grid();
  std::vector<double> waits;
  std::vector<double> pairs(3, 0.0);
  for (std::size_t r = 0; waits.size() < tol::kMergeEvents; ++r) {
    RngStream rng(mix64(o.seed, 14), r);
    const auto tr = reverse(build_cut_process(1.0, rng), grid);
    for (std::size_t k = 0; k < tr.merges.size(); ++k) {
      const auto& m = tr.merges[k];
      if (m.n_before != 3) continue;
      waits.push_back(m.coal_time - (k > 0 ? tr.merges[k - 1].coal_time : 0.0));
      const std::size_t idx = m.rank_i == 1 ? (m.rank_j == 2 ? 0 : 1) : 2;
      pairs[idx] += 1.0;
    }
  }
  const auto wait = estimate_mean(waits);
  auto row = within("AC14:wait_n3", wait.mean, 1.0 / 3.0, tol::kMergeWaitRel / 3.0);
  row.n1 = wait.n;
  row.note = "std_error " + std::to_string(wait.std_error);
  out.push_back(row);
  const double total = pairs[0] + pairs[1] + pairs[2];
  out.push_back(labelled("AC14:pair_uniform",
                         chi2_test(pairs, std::vector<double>(3, total / 3.0), tol::kChiSquareLevel)));

  auto chain = base_config(uniform_binary(), 1.0, mix64(o.seed, 141));
  chain.horizon = tol::kCutTime;
  const auto from_cuts = collect(tol::kCutSamples, [&](std::size_t r) {
    RngStream rng(mix64(o.seed, 142), r);
    return build_cut_process(1.0, rng).at(tol::kCutTime).size_at(0);
  });
  const auto from_chain =
      collect(tol::kCutSamples, [&](std::size_t r) { return run(chain, r).fragments_at(tol::kCutTime).size_at(0); });
  out.push_back(labelled("AC14:cuts_vs_chain", ks_test(from_cuts, from_chain, tol::kKsLevel)));
  return out;
}

// --- AC15 ----------------------------------------------------------------

std::string serialize_run(const SimConfig& cfg) {
  std::ostringstream os;
  const auto logs = run_replicas(cfg);
  write_trajectory_csv(os, logs);
  write_events_csv(os, logs);
  return os.str();
}

Reports ac15(const SuiteOptions& o) {
  Reports out;
  const auto law = uniform_binary();
  auto cfg = base_config(law, 0.0, mix64(o.seed, 15));
  cfg.horizon = tol::kCrossTime;
  std::vector<double> engine_counts(tol::kCrossCountCap + 1, 0.0), cascade_counts(tol::kCrossCountCap + 1, 0.0);
  const auto bin = [](std::size_t n) { return std::min(n, tol::kCrossCountCap); };
  GrowLimits limits;
  limits.max_death = tol::kCrossTime;
  for (std::size_t r = 0; r < tol::kCrossReplicas; ++r) {
    engine_counts[bin(run(cfg, r).fragments_at(tol::kCrossTime).size())] += 1.0;
    const auto tree = grow(*law, 0.0, limits, RngStream(mix64(o.seed, 151), r));
    cascade_counts[bin(time_slice(tree, tol::kCrossTime).size())] += 1.0;
  }
  out.push_back(labelled("AC15:cascade_vs_engine", chi2_homogeneity(engine_counts, cascade_counts, tol::kChiSquareLevel)));

  auto det = base_config(law, 0.0, mix64(o.seed, 152));
  det.horizon = 3.0;
  det.snapshot_times = {0.0, 1.0, 2.0, 3.0};
  det.replicas = tol::kDeterminismReplicas;
  const bool same = serialize_run(det) == serialize_run(det);
  out.push_back(within("AC15:determinism", same ? 0.0 : 1.0, 0.0, 0.0));

  RngStream rng(mix64(o.seed, 153), 0);
  const SizeFunctional square{[](double s) { return s * s; }, 0.0};
  const auto gen = generator_additive(MassPartition::from_log_sizes({0.0}), square, 0.0, *law, rng,
                                      tol::kGeneratorSamples);
  auto row = within("AC15:generator", gen.value, -1.0 / 3.0, tol::kGenerator);
  row.note = "std_error " + std::to_string(gen.std_error);
  out.push_back(row);

  auto step = base_config(law, 0.0, mix64(o.seed, 154));
  step.horizon = tol::kFiniteDifferenceStep;
  const auto quotient = collect(tol::kFiniteDifferenceRuns, [&](std::size_t r) {
    return (sum_of_squares(run(step, r).fragments_at(step.horizon)) - 1.0) / step.horizon;
  });
  const auto fd = estimate_mean(quotient);
  row = within("AC15:finite_difference", fd.mean, -1.0 / 3.0, tol::kGenerator);
  row.n1 = fd.n;
  row.note = "std_error " + std::to_string(fd.std_error);
  out.push_back(row);
  return out;
}

const std::map<std::string, std::function<Reports(const SuiteOptions&)>>& registry() {
  static const std::map<std::string, std::function<Reports(const SuiteOptions&)>> r = {
      {"AC1", ac1},   {"AC2", ac2},   {"AC3", ac3},   {"AC4", ac4},   {"AC5", ac5},
      {"AC6", ac6},   {"AC7", ac7},   {"AC8", ac8},   {"AC9", ac9},   {"AC10", ac10},
      {"AC11", ac11}, {"AC12", ac12}, {"AC13", ac13}, {"AC14", ac14}, {"AC15", ac15},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {"AC1", "AC2",  "AC3",  "AC4",  "AC5",  "AC6",  "AC7", "AC8",
                                               "AC9", "AC10", "AC11", "AC12", "AC13", "AC14", "AC15"};
  return ids;
}

std::vector<TestReport> run_suite(const std::string& id, const SuiteOptions& options) {
  const auto it = registry().find(id);
  if (it == registry().end()) throw UnknownSuiteError("unknown suite '" + id + "'");
  return it->second(options);
}

bool all_pass(const std::vector<TestReport>& reports) {
  return !reports.empty() && std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
}

}  // namespace fragchain
