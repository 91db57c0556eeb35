#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fragchain/core.hpp"
#include "fragchain/engine.hpp"
#include "fragchain/laws.hpp"

namespace fragchain {

/// Partition of {1..n}; blocks sorted internally and ordered by least element.
class PartitionOfN {
 public:
  PartitionOfN(std::size_t n, std::vector<std::vector<std::size_t>> blocks);

  std::size_t n() const { return n_; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
  /// True when every block of *this lies inside some block of `coarser`.
  bool refines(const PartitionOfN& coarser) const;
  /// Blocks separated by '|', members by ','.
  std::string to_string() const;

  bool operator==(const PartitionOfN&) const = default;

 private:
  std::size_t n_;
  std::vector<std::vector<std::size_t>> blocks_;
};

/// Kingman's paintbox: i and j share a block iff their uniforms fall in the
/// same interval of the left-to-right layout of s; uniforms landing in the
/// dust part become singletons.
PartitionOfN paintbox(const MassPartition& s, std::span<const double> uniforms);
PartitionOfN paintbox(const MassPartition& s, std::size_t n, RngStream& rng);

/// One line per block, comma separated member indices.
void write_partition(std::ostream& os, const PartitionOfN& partition);

/// A subinterval of (0,1) in the history of an interval fragmentation.
struct IntervalRecord {
  double left = 0.0;
  double right = 1.0;
  /// Exact log-length; right - left carries rounding.
  double log_size = 0.0;
  double birth = 0.0;
  /// +inf for intervals still alive when the history was cut.
  double death = kInf;
  /// Last time the history is known for an interval that is still alive.
  double censor = kInf;
  std::uint32_t parent = 0xffffffffu;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  /// Screened below the threshold: counts as dust.
  bool screened = false;
};

/// Nested family of open subsets of (0,1) together with tagged points.
class IntervalFragmentation {
 public:
  /// Lays out the genealogy of a log: children left to right in ranked
  /// order with lost mass at the right end of the parent.
  static IntervalFragmentation from_event_log(const EventLog& log, std::vector<double> tags = {});

  double alpha() const { return alpha_; }
  const std::vector<IntervalRecord>& intervals() const { return intervals_; }
  const std::vector<double>& tags() const { return tags_; }

  /// Indices of intervals alive at t. Throws TruncationError past a censor.
  std::vector<std::uint32_t> alive_at(double t) const;
  MassPartition ranked_at(double t) const;
  /// Interval holding y at time t, or nullopt when y is in the dust.
  std::optional<std::uint32_t> interval_containing(double y, double t) const;
  /// Tags i ~ j iff they share an interval of G(t).
  PartitionOfN partition_at(double t) const;
  /// Exact containment check of every child in its parent.
  bool nested() const;

 private:
  friend IntervalFragmentation time_change(const IntervalFragmentation&, double);
  double alpha_ = 0.0;
  std::vector<IntervalRecord> intervals_;
  std::vector<double> tags_;
};

/// Per-interval clock change T^{(α)}: an interval of length x that lives
/// for a duration d in the homogeneous history lives d·x^{-α} afterwards.
IntervalFragmentation time_change(const IntervalFragmentation& homogeneous, double alpha);

/// Runs the engine and records Π(t) for n tagged uniforms at each time.
std::vector<PartitionOfN> partition_process(const SimConfig& cfg, std::size_t n,
                                            std::span<const double> times, const RngStream& rng);

/// Size path of the fragment containing a uniform tag: jumps at split
/// times, erosion drift between them.
struct TaggedPath {
  std::vector<double> jump_times;
  /// Uneroded log-size after each jump; entry 0 is the start (time 0, log 0).
  std::vector<double> log_sizes;
  double erosion = 0.0;
  double horizon = 0.0;

  /// log χ(t); -inf after absorption in the dust.
  double log_at(double t) const;
};

/// Follows one tag through a chain with cfg's law, alpha and erosion. The
/// tag's relative position inside its fragment selects the child it falls
/// in; landing in lost mass, below the screen or in eroded mass (rate c)
/// absorbs the path.
TaggedPath tagged_path(const SimConfig& cfg, double horizon, RngStream& rng);

/// log χ(duration) for a homogeneous lineage started at unit size, without
/// erosion; -inf when absorbed.
double homogeneous_lineage_log(const DislocationLaw& law, double duration, RngStream& rng);

/// Atom (Δ, k, t) of the Poisson point process driving a homogeneous
/// fragmentation with finite dislocation measure.
struct PoissonAtom {
  MassPartition ratios;
  std::size_t index = 1;
  double time = 0.0;
};

/// Replaces the k-th largest term by its Δ-rescaled children and re-ranks.
MassPartition apply_atom(const MassPartition& state, const PoissonAtom& atom);

struct PoissonianRun {
  std::vector<PoissonAtom> atoms;
  /// X(t) = e^{-ct} Y(t) at the requested times.
  std::vector<MassPartition> states;
};

/// Homogeneous fragmentation built from atoms of intensity ν ⊗ # ⊗ dt.
/// Only atoms with k ≤ number of fragments act, so they are generated at
/// total rate #fragments. Finite (probability) ν only.
PoissonianRun poissonian_run(const DislocationLaw& law, double erosion, std::span<const double> times,
                             RngStream& rng, std::uint64_t event_budget = 10'000'000);

}  // namespace fragchain
