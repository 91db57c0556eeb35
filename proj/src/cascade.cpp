#include "fragchain/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fragchain/io.hpp"

namespace fragchain {

std::span<const TreeNode> MarkedTree::generation(std::uint32_t n) const {
  if (n > depth()) throw DomainError("tree: generation beyond depth");
  const auto begin = generation_begin_[n];
  const auto end = n + 1 < generation_begin_.size() ? generation_begin_[n + 1] : nodes_.size();
  return std::span<const TreeNode>(nodes_).subspan(begin, end - begin);
}

NodeLabel MarkedTree::label(std::uint32_t node) const {
  std::vector<std::uint32_t> path;
  for (auto u = node; nodes_[u].parent != 0xffffffffu; u = nodes_[u].parent)
    path.push_back(nodes_[u].child_index);
  std::reverse(path.begin(), path.end());
  return NodeLabel(std::move(path));
}

MarkedTree grow(const DislocationLaw& law, double alpha, const GrowLimits& limits, const RngStream& rng) {
  const auto lifetime = [alpha](RngStream& s, double log_size) {
    const double e = s.exponential();
    return alpha == 0.0 ? e : e * std::exp(-alpha * log_size);
  };
  MarkedTree tree;
  tree.alpha_ = alpha;
  auto& nodes = tree.nodes_;
  {
    TreeNode root;
    RngStream s = node_stream(rng, root.key);
    root.mark = {0.0, 0.0, lifetime(s, 0.0)};
    nodes.push_back(root);
  }
  tree.generation_begin_.push_back(0);

  std::vector<double> log_ratios;
  std::size_t begin = 0;
  for (std::uint32_t gen = 0;; ++gen) {
    const std::size_t end = nodes.size();
    if (gen >= limits.max_generation) break;
    for (std::size_t i = begin; i < end; ++i) {
      const TreeNode parent = nodes[i];
      if (parent.mark.log_size <= limits.min_log_size || parent.mark.death() > limits.max_death) continue;
      RngStream s = node_stream(rng, parent.key);
      s.exponential();  // the parent's lifetime
      law.sample_log_ratios(s, log_ratios);
      if (nodes.size() + log_ratios.size() > limits.population_cap)
        throw BudgetExceeded("grow: population cap exceeded");
      nodes[i].expanded = true;
      nodes[i].first_child = static_cast<std::uint32_t>(nodes.size());
      nodes[i].child_count = static_cast<std::uint32_t>(log_ratios.size());
      for (std::uint32_t j = 0; j < log_ratios.size(); ++j) {
        TreeNode child;
        child.key = child_key(parent.key, j + 1);
        child.parent = static_cast<std::uint32_t>(i);
        child.child_index = j + 1;
        child.generation = gen + 1;
        child.log_ratio = log_ratios[j];
        const double child_log = parent.mark.log_size + log_ratios[j];
        RngStream cs = node_stream(rng, child.key);
        child.mark = {child_log, parent.mark.death(), lifetime(cs, child_log)};
        nodes.push_back(child);
      }
    }
    if (nodes.size() == end) break;
    tree.generation_begin_.push_back(end);
    begin = end;
  }
  return tree;
}

MarkedTree grow(const DislocationLaw& law, double alpha, std::uint32_t generations, const RngStream& rng) {
  GrowLimits limits;
  limits.max_generation = generations;
  return grow(law, alpha, limits, rng);
}

MartingaleSeries intrinsic_martingale(const MarkedTree& tree, double p_star) {
  MartingaleSeries series;
  for (std::uint32_t n = 0; n <= tree.depth(); ++n) {
    if (n > 0)
      for (const auto& node : tree.generation(n - 1))
        if (!node.expanded) throw TruncationError("intrinsic_martingale: generation is incomplete");
    double total = 0.0;
    for (const auto& node : tree.generation(n)) total += std::exp(p_star * node.mark.log_size);
    series.values.push_back(total);
  }
  return series;
}

TestReport fixed_point_check(std::span<const double> direct, const DislocationLaw& law, double p_star,
                             RngStream& rng, double max_distance) {
  if (direct.size() < 500) throw DomainError("fixed_point_check: need at least 500 samples");
  std::vector<double> recomposed;
  recomposed.reserve(direct.size());
  std::vector<double> logs;
  const auto pool = direct.size();
  for (std::size_t i = 0; i < pool; ++i) {
    law.sample_log_ratios(rng, logs);
    double total = 0.0;
    for (double l : logs) {
      const auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool));
      total += std::exp(p_star * l) * direct[std::min(pick, pool - 1)];
    }
    recomposed.push_back(total);
  }
  TestReport r = ks_test(direct, recomposed, 0.0);
  r.tolerance = max_distance;
  r.pass = r.statistic < max_distance;
  return r;
}

MassPartition time_slice(const MarkedTree& tree, double t) {
  std::vector<double> logs;
  for (const auto& node : tree.nodes()) {
    if (node.mark.birth > t) continue;
    if (t < node.mark.death()) {
      logs.push_back(node.mark.log_size);
    } else if (!node.expanded) {
      throw TruncationError("time_slice: tree too shallow for the requested time");
    }
  }
  return MassPartition::from_log_sizes(std::move(logs));
}

double energy_cost(const MarkedTree& tree, const CostSpec& cost, double epsilon) {
  if (epsilon >= 1.0) return 0.0;
  const double log_eps = std::log(epsilon);
  double total = 0.0;
  std::vector<double> ratios;
  for (const auto& node : tree.nodes()) {
    if (node.mark.log_size <= log_eps) continue;
    if (!node.expanded) throw TruncationError("energy_cost: a node above epsilon was not expanded");
    ratios.clear();
    for (std::uint32_t j = 0; j < node.child_count; ++j) ratios.push_back(tree.nodes()[node.first_child + j].log_ratio);
    total += std::exp(cost.beta * node.mark.log_size) * cost.phi(MassPartition::from_log_sizes(ratios));
  }
  return total;
}

void write_tree_csv(std::ostream& os, const MarkedTree& tree) {
  os << "label,log_size,birth,lifetime\n";
  for (std::uint32_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& m = tree.nodes()[i].mark;
    os << tree.label(i).to_string() << ',' << format_double(m.log_size) << ',' << format_double(m.birth)
       << ',' << format_double(m.lifetime) << '\n';
  }
}

}  // namespace fragchain
