#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "fragchain/core.hpp"
#include "fragchain/engine.hpp"
#include "fragchain/laws.hpp"
#include "fragchain/stats.hpp"

namespace fragchain {

/// Which nodes get expanded when growing a tree. A node is expanded when it
/// satisfies every limit.
struct GrowLimits {
  std::uint32_t max_generation = std::numeric_limits<std::uint32_t>::max();
  /// Expand only nodes with log-size above this floor.
  double min_log_size = kNegInf;
  /// Expand only nodes whose death time a_u + ζ_u is at most this.
  double max_death = kInf;
  std::size_t population_cap = 10'000'000;
};

struct TreeNode {
  std::uint64_t key = kRootKey;
  TreeMark mark;
  /// log ξ̃_u, the ratio to the parent; 0 for the root.
  double log_ratio = 0.0;
  std::uint32_t parent = 0xffffffffu;
  std::uint32_t child_index = 0;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  std::uint32_t generation = 0;
  bool expanded = false;
};

/// Genealogical tree with marks (ξ_u, a_u, ζ_u), stored breadth-first so each
/// generation occupies a contiguous range.
class MarkedTree {
 public:
  double alpha() const { return alpha_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  /// Deepest generation present.
  std::uint32_t depth() const { return static_cast<std::uint32_t>(generation_begin_.size()) - 1; }
  std::span<const TreeNode> generation(std::uint32_t n) const;
  NodeLabel label(std::uint32_t node) const;

 private:
  friend MarkedTree grow(const DislocationLaw&, double, const GrowLimits&, const RngStream&);
  double alpha_ = 0.0;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> generation_begin_;
};

/// Grows the tree with the same per-node streams the engine uses, so marks
/// agree bit for bit with an engine run of the same (seed, replica).
MarkedTree grow(const DislocationLaw& law, double alpha, const GrowLimits& limits, const RngStream& rng);
MarkedTree grow(const DislocationLaw& law, double alpha, std::uint32_t generations, const RngStream& rng);

struct MartingaleSeries {
  /// values[n] = Σ_{|u|=n} ξ_u^{p*}.
  std::vector<double> values;
};

/// Requires every generation up to the requested depth to be complete.
MartingaleSeries intrinsic_martingale(const MarkedTree& tree, double p_star);

/// Two-sample KS between direct samples of the 𝓜_∞ proxy and
/// recompositions Σ_j ξ_j^{p*} 𝓜^{(j)} with fresh ξ ~ ν and 𝓜^{(j)} drawn
/// from the same pool. Passes when the KS distance is below max_distance.
TestReport fixed_point_check(std::span<const double> direct, const DislocationLaw& law, double p_star,
                             RngStream& rng, double max_distance = 0.05);

/// Ranked sizes of nodes alive at time t (a_u ≤ t < a_u + ζ_u). Throws
/// TruncationError when an unexpanded node died before t.
MassPartition time_slice(const MarkedTree& tree, double t);

/// Σ over expanded nodes of size > ε of size^β φ(child ratios). Every node
/// above ε must be expanded, e.g. grow with min_log_size = ln ε.
double energy_cost(const MarkedTree& tree, const CostSpec& cost, double epsilon);

/// label,log_size,birth,lifetime
void write_tree_csv(std::ostream& os, const MarkedTree& tree);

}  // namespace fragchain
