#include "fragchain/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "fragchain/analytic.hpp"
#include "fragchain/partition.hpp"

namespace fragchain {

namespace {

constexpr std::uint64_t kContinuationKey = 0xc0a71e5a7c0ffee1ULL;

void require_replicas(const SimConfig& cfg, const char* what) {
  if (cfg.replicas < 2) throw DomainError(std::string(what) + ": insufficient replicas (need at least 2)");
}

void require_homogeneous(const SimConfig& cfg, const char* what) {
  if (cfg.alpha != 0.0) throw PreconditionError(std::string(what) + ": requires alpha = 0");
}

void require_non_geometric(const SimConfig& cfg, const char* what) {
  if (cfg.law->metadata().geometric) throw PreconditionError(std::string(what) + ": requires a non-geometric law");
}

SimConfig run_until(const SimConfig& cfg, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("estimator: time must be positive and finite");
  SimConfig out = cfg;
  out.horizon = t;
  out.snapshot_times.clear();
  out.validate();
  return out;
}

// Evaluates fn on every replica in parallel and returns results in replica order.
template <class T, class Fn>
std::vector<T> per_replica(std::size_t replicas, Fn fn) {
  std::vector<T> out(replicas);
  parallel_for(replicas, [&](std::size_t r) { out[r] = fn(r); });
  return out;
}

double p_star_of(const SimConfig& cfg) { return KappaFunction(cfg.law, {cfg.erosion}).malthusian(); }

}  // namespace

double WeightedEmpirical::total_weight() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

WeightedEmpirical weighted_empirical(const EventLog& log, double t, double p,
                                     const DislocationLaw* continuation_law, RngStream* continuation) {
  WeightedEmpirical out;
  out.time = t;
  out.replica = log.replica();
  const auto alive = log.fragments_at(t);
  for (double l : alive.log_sizes()) {
    out.log_sizes.push_back(l);
    out.weights.push_back(std::exp(p * l));
  }
  if (!continuation_law || !continuation) return out;
  if (log.alpha() != 0.0) throw PreconditionError("weighted_empirical: continuation needs a homogeneous log");
  const double drift = -log.erosion() * t;
  for (auto u : log.screened_nodes()) {
    const auto& mark = log.nodes()[u].mark;
    if (mark.birth > t) continue;
    const double lineage = homogeneous_lineage_log(*continuation_law, t - mark.birth, *continuation);
    if (lineage == kNegInf) continue;
    const double l = mark.log_size + lineage + drift;
    out.log_sizes.push_back(l);
    out.weights.push_back(std::exp(p * l - lineage));
  }
  return out;
}

WeightedEmpirical weighted_empirical(const SimConfig& cfg, std::size_t replica, double t, double p) {
  const SimConfig c = run_until(cfg, t);
  RngStream rng(c.seed, replica);
  RngStream cont = rng.substream(kContinuationKey);
  const auto log = run(c, rng);
  if (c.alpha != 0.0) return weighted_empirical(log, t, p);
  return weighted_empirical(log, t, p, c.law.get(), &cont);
}

double clamped_identity(double x) { return std::clamp(x, -3.0, 0.0); }

MeanEstimate lln_functional(const SimConfig& cfg, double t, const std::function<double(double)>& f) {
  require_replicas(cfg, "lln_functional");
  require_homogeneous(cfg, "lln_functional");
  const double p_star = p_star_of(cfg);
  const auto values = per_replica<double>(cfg.replicas, [&](std::size_t r) {
    const auto e = weighted_empirical(cfg, r, t, p_star);
    double total = 0.0;
    for (std::size_t i = 0; i < e.weights.size(); ++i) total += e.weights[i] * f(e.log_sizes[i] / t);
    return total;
  });
  return estimate_mean(values);
}

CltEstimate clt_functional(const SimConfig& cfg, double t) {
  require_replicas(cfg, "clt_functional");
  require_homogeneous(cfg, "clt_functional");
  require_non_geometric(cfg, "clt_functional");
  const KappaFunction kappa(cfg.law, {cfg.erosion});
  const double p_star = kappa.malthusian();
  const double speed = kappa.derivative(p_star, 1);
  const double root_t = std::sqrt(t);
  struct Sums {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  };
  const auto sums = per_replica<Sums>(cfg.replicas, [&](std::size_t r) {
    const auto e = weighted_empirical(cfg, r, t, p_star);
    Sums s;
    for (std::size_t i = 0; i < e.weights.size(); ++i) {
      const double z = (e.log_sizes[i] + speed * t) / root_t;
      s.s0 += e.weights[i];
      s.s1 += e.weights[i] * z;
      s.s2 += e.weights[i] * z * z;
    }
    return s;
  });
  Sums total;
  for (const auto& s : sums) {
    total.s0 += s.s0;
    total.s1 += s.s1;
    total.s2 += s.s2;
  }
  if (!(total.s0 > 0.0)) throw DomainError("clt_functional: all mass vanished");
  CltEstimate out;
  out.mean = total.s1 / total.s0;
  out.variance = total.s2 / total.s0 - out.mean * out.mean;
  out.replicas = cfg.replicas;
  return out;
}

MeanEstimate scaled_moment(const SimConfig& cfg, double t, std::size_t k) {
  require_replicas(cfg, "scaled_moment");
  if (!(cfg.alpha > 0.0)) throw PreconditionError("scaled_moment: requires alpha > 0");
  require_non_geometric(cfg, "scaled_moment");
  if (k == 0) throw DomainError("scaled_moment: k must be positive");
  const double p_star = p_star_of(cfg);
  const double ak = cfg.alpha * static_cast<double>(k);
  const double shift = std::log(t) / cfg.alpha;
  const SimConfig c = run_until(cfg, t);
  const auto values = per_replica<double>(c.replicas, [&](std::size_t r) {
    double total = 0.0;
    const auto x = run(c, r).fragments_at(t);
    for (double l : x.log_sizes()) total += std::exp(p_star * l + ak * (l + shift));
    return total;
  });
  return estimate_mean(values);
}

MeanEstimate largest_rate(const SimConfig& cfg, double t) {
  require_replicas(cfg, "largest_rate");
  require_homogeneous(cfg, "largest_rate");
  if (cfg.erosion != 0.0 || !cfg.law->metadata().conservative)
    throw PreconditionError("largest_rate: requires c = 0 and a conservative law");
  if (cfg.mode == SimMode::threshold) {
    const KappaFunction kappa(cfg.law);
    const double bound = -kappa.derivative(kappa.p_bar(), 1) * t - 5.0;
    if (!(std::log(cfg.epsilon) < bound))
      throw PreconditionError("largest_rate: threshold too large, the largest fragment could be screened");
  }
  const SimConfig c = run_until(cfg, t);
  const auto values = per_replica<double>(c.replicas, [&](std::size_t r) {
    const auto x = run(c, r).fragments_at(t);
    if (x.empty()) throw DomainError("largest_rate: no fragment left above the screen");
    return x.log_size(0) / t;
  });
  return estimate_mean(values);
}

std::vector<std::vector<double>> additive_martingale(const SimConfig& cfg, double p,
                                                     std::span<const double> times) {
  require_homogeneous(cfg, "additive_martingale");
  if (cfg.erosion != 0.0 || !cfg.law->metadata().conservative)
    throw PreconditionError("additive_martingale: requires c = 0 and a conservative law");
  if (times.empty() || !std::is_sorted(times.begin(), times.end()))
    throw DomainError("additive_martingale: times must be a sorted non-empty grid");
  const KappaFunction kappa(cfg.law);
  if (!(p > kappa.underline_p())) throw DomainError("additive_martingale: p must exceed underline p");
  const double kp = kappa(p);
  const SimConfig c = run_until(cfg, times.back());
  return per_replica<std::vector<double>>(c.replicas, [&](std::size_t r) {
    RngStream rng(c.seed, r);
    RngStream cont = rng.substream(kContinuationKey);
    const auto log = run(c, rng);
    std::vector<double> series;
    for (double t : times) {
      const auto e = weighted_empirical(log, t, p, c.law.get(), &cont);
      series.push_back(std::exp(t * kp) * e.total_weight());
    }
    return series;
  });
}

}  // namespace fragchain
