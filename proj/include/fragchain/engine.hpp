#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fragchain/analytic.hpp"
#include "fragchain/core.hpp"
#include "fragchain/laws.hpp"

namespace fragchain {

enum class SimMode { exact, threshold };

const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& text);

struct SimConfig {
  LawPtr law;
  double erosion = 0.0;
  double alpha = 0.0;
  SimMode mode = SimMode::exact;
  /// Screen size; threshold mode only.
  double epsilon = 0.0;
  /// May be infinite in threshold mode when alpha >= 0 or for extinction runs.
  double horizon = 1.0;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  std::uint64_t event_budget = 100'000'000;

  /// Throws PreconditionError on an invalid combination.
  void validate() const;
};

enum class NodeState : std::uint8_t { alive, split, screened };

inline constexpr std::uint32_t kNoParent = 0xffffffffu;

/// One genealogical node. Children of a split node are stored contiguously.
struct NodeRecord {
  std::uint64_t key = kRootKey;
  TreeMark mark;
  std::uint32_t parent = kNoParent;
  std::uint32_t child_index = 0;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  NodeState state = NodeState::alive;
};

struct Event {
  double time;
  std::uint32_t node;
};

struct Snapshot {
  double time;
  MassPartition fragments;
  double dust;
};

/// Record of one replica: the genealogy with marks, dislocation events in
/// time order, the dust step function and snapshots.
class EventLog {
 public:
  std::size_t replica() const { return replica_; }
  double horizon() const { return horizon_; }
  double erosion() const { return erosion_; }
  double alpha() const { return alpha_; }
  /// log ε, or -inf in exact mode.
  double log_epsilon() const { return log_epsilon_; }

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<Event>& events() const { return events_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  /// (time, D(time)) after every change of the uneroded dust mass.
  const std::vector<std::pair<double, double>>& dust_steps() const { return dust_steps_; }

  NodeLabel label(std::uint32_t node) const;
  /// Child-to-parent ratios of a split node, including screened children.
  MassPartition ratios(std::uint32_t node) const;

  /// Time of the root's dislocation, or +inf if it happened after the horizon.
  double first_event_time() const;
  std::optional<double> extinction_time() const { return extinction_; }

  /// Ranked sizes alive at time t (erosion applied), t ≤ horizon.
  MassPartition fragments_at(double t) const;
  /// D(t) = 1 - Σ X_i(t).
  double dust_at(double t) const;
  /// Screened (first-passage) nodes in creation order.
  std::vector<std::uint32_t> screened_nodes() const;

 private:
  friend EventLog run(const SimConfig&, const RngStream&);
  std::size_t replica_ = 0;
  double horizon_ = 0.0;
  double erosion_ = 0.0;
  double alpha_ = 0.0;
  double log_epsilon_ = kNegInf;
  std::vector<NodeRecord> nodes_;
  std::vector<Event> events_;
  std::vector<Snapshot> snapshots_;
  std::vector<std::pair<double, double>> dust_steps_;
  std::optional<double> extinction_;
};

/// Simulates one replica. The stream's (seed, stream_index) selects the
/// per-node randomness; stream_index is taken as the replica id.
EventLog run(const SimConfig& cfg, const RngStream& rng);
inline EventLog run(const SimConfig& cfg, std::size_t replica) {
  return run(cfg, RngStream(cfg.seed, replica));
}

/// Runs replicas 0..cfg.replicas-1 in parallel; results in replica order.
std::vector<EventLog> run_replicas(const SimConfig& cfg);

/// Applies fn(i) for i in [0, n) across hardware threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// First time the live population is empty; requires alpha < 0 and threshold
/// mode. Returns nullopt when the horizon is reached first.
std::optional<double> extinction_time(const SimConfig& cfg, const RngStream& rng);

struct CostSpec {
  std::function<double(const MassPartition&)> phi;
  double beta = 0.0;
  /// φ ≡ 1.
  static CostSpec unit(double beta);
};

/// Σ over dislocations of parents with size > ε of size^β φ(ratios).
/// The log must come from a threshold run with screen ≤ ε and unbounded
/// horizon (or be otherwise complete above ε).
double energy_cost(const EventLog& log, const CostSpec& cost, double epsilon);
/// Runs the homogeneous cascade screened at ε and evaluates the energy.
double energy_cost(const SimConfig& cfg, const CostSpec& cost, double epsilon, const RngStream& rng);

struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;
  double total_weight() const;
};

/// Atoms ξ_u/ε with weights ξ_u^{p*} for first-passage nodes of a screened
/// run at ε with unbounded horizon.
WeightedSample exit_samples(const EventLog& log, double p_star);
WeightedSample exit_samples(const SimConfig& cfg, double epsilon, double p_star, const RngStream& rng);

/// f with f = 0 on [0, cutoff).
struct SizeFunctional {
  std::function<double(double)> f;
  double cutoff = 0.0;
};

struct GeneratorEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// G A(x) = Σ_i x_i^α ∫ (A(x_i s) - f(x_i)) ν(ds) for A(s) = Σ f(s_i), by
/// Monte Carlo over ν with `samples` draws.
GeneratorEstimate generator_additive(const MassPartition& x, const SizeFunctional& f, double alpha,
                                     const DislocationLaw& law, RngStream& rng, std::size_t samples);

/// G M(x) = Σ_i x_i^α M(x)/g(x_i) ∫ (M(x_i s) - g(x_i)) ν(ds) for
/// M(s) = Π g(s_i). `g` should equal 1 near 0.
GeneratorEstimate generator_multiplicative(const MassPartition& x,
                                           const std::function<double(double)>& g, double alpha,
                                           const DislocationLaw& law, RngStream& rng,
                                           std::size_t samples);

void write_trajectory_csv(std::ostream& os, const std::vector<EventLog>& logs);
void write_events_csv(std::ostream& os, const std::vector<EventLog>& logs);

}  // namespace fragchain
