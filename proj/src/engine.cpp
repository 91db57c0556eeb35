#include "fragchain/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>

#include "fragchain/io.hpp"

namespace fragchain {

const char* to_string(SimMode mode) { return mode == SimMode::exact ? "exact" : "threshold"; }

SimMode sim_mode_from_string(const std::string& text) {
  if (text == "exact") return SimMode::exact;
  if (text == "threshold") return SimMode::threshold;
  throw PreconditionError("unknown simulation mode '" + text + "'");
}

void SimConfig::validate() const {
  if (!law) throw PreconditionError("config: missing dislocation law");
  ErosionParams{erosion}.validate();
  if (!std::isfinite(alpha)) throw PreconditionError("config: alpha must be finite");
  // X(t) = e^{-ct} Y(t) only describes erosion in the homogeneous case.
  if (erosion > 0.0 && alpha != 0.0) throw PreconditionError("config: erosion requires alpha = 0");
  if (!(horizon > 0.0)) throw PreconditionError("config: horizon must be positive");
  if (mode == SimMode::exact) {
    if (alpha < 0.0) throw PreconditionError("config: exact mode requires alpha >= 0 (shattering)");
    if (!law->metadata().max_children)
      throw PreconditionError("config: exact mode requires a bounded number of children");
    if (!std::isfinite(horizon)) throw PreconditionError("config: exact mode requires a finite horizon");
  } else {
    if (!(epsilon > 0.0 && epsilon < 1.0))
      throw PreconditionError("config: threshold mode requires epsilon in (0, 1)");
  }
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end()))
    throw PreconditionError("config: snapshot times must be sorted");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= horizon) || !std::isfinite(t))
      throw PreconditionError("config: snapshot times must lie in [0, horizon]");
  if (replicas == 0) throw PreconditionError("config: replicas must be positive");
  if (event_budget == 0) throw PreconditionError("config: event budget must be positive");
}

NodeLabel EventLog::label(std::uint32_t node) const {
  std::vector<std::uint32_t> path;
  for (auto u = node; nodes_[u].parent != kNoParent; u = nodes_[u].parent)
    path.push_back(nodes_[u].child_index);
  std::reverse(path.begin(), path.end());
  return NodeLabel(std::move(path));
}

MassPartition EventLog::ratios(std::uint32_t node) const {
  const auto& n = nodes_[node];
  std::vector<double> logs;
  for (auto c = n.first_child; c < n.first_child + n.child_count; ++c)
    logs.push_back(nodes_[c].mark.log_size - n.mark.log_size);
  return MassPartition::from_log_sizes(std::move(logs));
}

double EventLog::first_event_time() const {
  return events_.empty() ? kInf : events_.front().time;
}

MassPartition EventLog::fragments_at(double t) const {
  if (t > horizon_) throw DomainError("fragments_at: time beyond the simulated horizon");
  std::vector<double> logs;
  const double drift = -erosion_ * t;
  for (const auto& n : nodes_) {
    if (n.state == NodeState::screened) continue;
    if (n.mark.birth <= t && t < n.mark.death()) logs.push_back(n.mark.log_size + drift);
  }
  return MassPartition::from_log_sizes(std::move(logs));
}

double EventLog::dust_at(double t) const {
  auto it = std::upper_bound(dust_steps_.begin(), dust_steps_.end(), t,
                             [](double v, const auto& step) { return v < step.first; });
  const double uneroded = it == dust_steps_.begin() ? 0.0 : std::prev(it)->second;
  if (erosion_ == 0.0) return uneroded;
  return 1.0 - std::exp(-erosion_ * t) * (1.0 - uneroded);
}

std::vector<std::uint32_t> EventLog::screened_nodes() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].state == NodeState::screened) out.push_back(i);
  return out;
}

namespace {

// Lexicographic Ulam-Harris comparison, needed only for tied death times.
bool label_less(const std::vector<NodeRecord>& nodes, std::uint32_t a, std::uint32_t b) {
  const auto path = [&](std::uint32_t u) {
    std::vector<std::uint32_t> p;
    for (; nodes[u].parent != kNoParent; u = nodes[u].parent) p.push_back(nodes[u].child_index);
    std::reverse(p.begin(), p.end());
    return p;
  };
  return path(a) < path(b);
}

double draw_lifetime(RngStream& stream, double log_size, double alpha) {
  const double e = stream.exponential();
  return alpha == 0.0 ? e : e * std::exp(-alpha * log_size);
}

}  // namespace

EventLog run(const SimConfig& cfg, const RngStream& rng) {
  cfg.validate();
  EventLog log;
  log.replica_ = rng.stream_index();
  log.horizon_ = cfg.horizon;
  log.erosion_ = cfg.erosion;
  log.alpha_ = cfg.alpha;
  const bool screening = cfg.mode == SimMode::threshold;
  log.log_epsilon_ = screening ? std::log(cfg.epsilon) : kNegInf;
  const bool conservative = cfg.law->metadata().conservative;

  auto& nodes = log.nodes_;
  {
    NodeRecord root;
    RngStream stream = node_stream(rng, root.key);
    root.mark = {0.0, 0.0, draw_lifetime(stream, 0.0, cfg.alpha)};
    nodes.push_back(root);
  }

  const auto later = [&nodes](const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    return label_less(nodes, b.node, a.node);
  };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> queue(later);
  queue.push({nodes[0].mark.death(), 0});

  std::vector<double> log_ratios;
  std::size_t live = 1;
  double dust = 0.0;
  std::uint64_t events = 0;

  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.time > cfg.horizon) break;
    queue.pop();
    if (++events > cfg.event_budget)
      throw BudgetExceeded("event budget exceeded; parameter regime unsuitable for this mode");

    const NodeRecord parent = nodes[ev.node];
    RngStream stream = node_stream(rng, parent.key);
    stream.exponential();  // lifetime, already consumed at creation
    cfg.law->sample_log_ratios(stream, log_ratios);

    const auto first = static_cast<std::uint32_t>(nodes.size());
    nodes[ev.node].state = NodeState::split;
    nodes[ev.node].first_child = first;
    nodes[ev.node].child_count = static_cast<std::uint32_t>(log_ratios.size());

    double dust_gain = 0.0;
    double child_mass = 0.0;
    std::size_t alive_children = 0;
    for (std::uint32_t j = 0; j < log_ratios.size(); ++j) {
      NodeRecord child;
      child.key = child_key(parent.key, j + 1);
      child.parent = ev.node;
      child.child_index = j + 1;
      const double child_log = parent.mark.log_size + log_ratios[j];
      RngStream cs = node_stream(rng, child.key);
      child.mark = {child_log, ev.time, draw_lifetime(cs, child_log, cfg.alpha)};
      if (screening && child_log <= log.log_epsilon_) {
        child.state = NodeState::screened;
        dust_gain += std::exp(child_log);
      } else {
        ++alive_children;
        queue.push({child.mark.death(), static_cast<std::uint32_t>(nodes.size())});
      }
      child_mass += std::exp(log_ratios[j]);
      nodes.push_back(child);
    }
    if (!conservative) dust_gain += std::exp(parent.mark.log_size) * std::max(0.0, 1.0 - child_mass);

    log.events_.push_back({ev.time, ev.node});
    if (dust_gain > 0.0) {
      dust += dust_gain;
      log.dust_steps_.emplace_back(ev.time, dust);
    }
    live = live - 1 + alive_children;
    if (live == 0) {
      log.extinction_ = ev.time;
      break;
    }
  }

  for (double t : cfg.snapshot_times) log.snapshots_.push_back({t, log.fragments_at(t), log.dust_at(t)});
  return log;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<EventLog> run_replicas(const SimConfig& cfg) {
  cfg.validate();
  std::vector<EventLog> logs(cfg.replicas);
  parallel_for(cfg.replicas, [&](std::size_t i) { logs[i] = run(cfg, i); });
  return logs;
}

std::optional<double> extinction_time(const SimConfig& cfg, const RngStream& rng) {
  if (!(cfg.alpha < 0.0) || cfg.mode != SimMode::threshold)
    throw PreconditionError("extinction_time: requires alpha < 0 and threshold mode");
  return run(cfg, rng).extinction_time();
}

CostSpec CostSpec::unit(double beta) {
  return {[](const MassPartition&) { return 1.0; }, beta};
}

double energy_cost(const EventLog& log, const CostSpec& cost, double epsilon) {
  if (epsilon >= 1.0) return 0.0;
  if (std::log(epsilon) < log.log_epsilon())
    throw PreconditionError("energy_cost: log was screened above the requested epsilon");
  const double log_eps = std::log(epsilon);
  double total = 0.0;
  for (const auto& ev : log.events()) {
    const auto& n = log.nodes()[ev.node];
    if (n.mark.log_size <= log_eps) continue;
    total += std::exp(cost.beta * n.mark.log_size) * cost.phi(log.ratios(ev.node));
  }
  return total;
}

double energy_cost(const SimConfig& cfg, const CostSpec& cost, double epsilon, const RngStream& rng) {
  if (epsilon >= 1.0) return 0.0;
  SimConfig homogeneous = cfg;
  homogeneous.alpha = 0.0;
  homogeneous.erosion = 0.0;
  homogeneous.mode = SimMode::threshold;
  homogeneous.epsilon = epsilon;
  homogeneous.horizon = kInf;
  homogeneous.snapshot_times.clear();
  return energy_cost(run(homogeneous, rng), cost, epsilon);
}

double WeightedSample::total_weight() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

WeightedSample exit_samples(const EventLog& log, double p_star) {
  if (log.log_epsilon() == kNegInf) throw PreconditionError("exit_samples: log has no screen");
  WeightedSample out;
  for (auto u : log.screened_nodes()) {
    const double l = log.nodes()[u].mark.log_size;
    out.values.push_back(std::exp(l - log.log_epsilon()));
    out.weights.push_back(std::exp(p_star * l));
  }
  return out;
}

WeightedSample exit_samples(const SimConfig& cfg, double epsilon, double p_star, const RngStream& rng) {
  SimConfig screened = cfg;
  screened.mode = SimMode::threshold;
  screened.epsilon = epsilon;
  screened.horizon = kInf;
  screened.erosion = 0.0;
  screened.snapshot_times.clear();
  return exit_samples(run(screened, rng), p_star);
}

namespace {

void check_cutoff(const SizeFunctional& f) {
  if (!(f.cutoff >= 0.0)) throw DomainError("generator: cutoff must be nonnegative");
  if (f.f(0.0) != 0.0) throw DomainError("generator: f must vanish at 0");
}

GeneratorEstimate finish(double sum, double sum_sq, std::size_t n) {
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n > 1 ? n - 1 : 1))};
}

}  // namespace

GeneratorEstimate generator_additive(const MassPartition& x, const SizeFunctional& f, double alpha,
                                     const DislocationLaw& law, RngStream& rng, std::size_t samples) {
  check_cutoff(f);
  if (x.empty()) return {0.0, 0.0};
  if (samples < 2) throw DomainError("generator: need at least two samples");
  const auto eval = [&](double s) {
    const double v = f.f(s);
    if (s < f.cutoff && v != 0.0) throw DomainError("generator: f is nonzero below its declared cutoff");
    return v;
  };
  std::vector<double> logs;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    law.sample_log_ratios(rng, logs);
    double g = 0.0;
    for (double xi_log : x.log_sizes()) {
      const double xi = std::exp(xi_log);
      double after = 0.0;
      for (double l : logs) after += eval(std::exp(xi_log + l));
      g += std::exp(alpha * xi_log) * (after - eval(xi));
    }
    sum += g;
    sum_sq += g * g;
  }
  return finish(sum, sum_sq, samples);
}

GeneratorEstimate generator_multiplicative(const MassPartition& x,
                                           const std::function<double(double)>& g, double alpha,
                                           const DislocationLaw& law, RngStream& rng,
                                           std::size_t samples) {
  if (x.empty()) return {0.0, 0.0};
  if (samples < 2) throw DomainError("generator: need at least two samples");
  double m = 1.0;
  for (double l : x.log_sizes()) m *= g(std::exp(l));
  std::vector<double> logs;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    law.sample_log_ratios(rng, logs);
    double total = 0.0;
    for (double xi_log : x.log_sizes()) {
      const double gx = g(std::exp(xi_log));
      double after = 1.0;
      for (double l : logs) after *= g(std::exp(xi_log + l));
      total += std::exp(alpha * xi_log) * m / gx * (after - gx);
    }
    sum += total;
    sum_sq += total * total;
  }
  return finish(sum, sum_sq, samples);
}

void write_trajectory_csv(std::ostream& os, const std::vector<EventLog>& logs) {
  os << "replica,time,rank,log_size\n";
  for (const auto& log : logs)
    for (const auto& snap : log.snapshots())
      for (std::size_t i = 0; i < snap.fragments.size(); ++i)
        os << log.replica() << ',' << format_double(snap.time) << ',' << i + 1 << ','
           << format_double(snap.fragments.log_size(i)) << '\n';
}

void write_events_csv(std::ostream& os, const std::vector<EventLog>& logs) {
  os << "replica,time,parent_label,child_count,parent_log_size\n";
  for (const auto& log : logs)
    for (const auto& ev : log.events()) {
      const auto& n = log.nodes()[ev.node];
      os << log.replica() << ',' << format_double(ev.time) << ',' << log.label(ev.node).to_string()
         << ',' << n.child_count << ',' << format_double(n.mark.log_size) << '\n';
    }
}

}  // namespace fragchain
