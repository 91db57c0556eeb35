#include "fragchain/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace fragchain {

PartitionOfN::PartitionOfN(std::size_t n, std::vector<std::vector<std::size_t>> blocks) : n_(n) {
  std::vector<bool> seen(n + 1, false);
  std::size_t covered = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw DomainError("partition: empty block");
    std::sort(b.begin(), b.end());
    for (auto i : b) {
      if (i < 1 || i > n) throw DomainError("partition: member outside 1..n");
      if (seen[i]) throw DomainError("partition: blocks overlap");
      seen[i] = true;
      ++covered;
    }
  }
  if (covered != n) throw DomainError("partition: blocks do not cover 1..n");
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  blocks_ = std::move(blocks);
}

bool PartitionOfN::refines(const PartitionOfN& coarser) const {
  if (coarser.n_ != n_) return false;
  std::vector<std::size_t> owner(n_ + 1);
  for (std::size_t k = 0; k < coarser.blocks_.size(); ++k)
    for (auto i : coarser.blocks_[k]) owner[i] = k;
  for (const auto& b : blocks_)
    for (auto i : b)
      if (owner[i] != owner[b.front()]) return false;
  return true;
}

std::string PartitionOfN::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (k) os << '|';
    for (std::size_t j = 0; j < blocks_[k].size(); ++j) os << (j ? "," : "") << blocks_[k][j];
  }
  return os.str();
}

PartitionOfN paintbox(const MassPartition& s, std::span<const double> uniforms) {
  std::vector<double> cumulative;
  double total = 0.0;
  for (double x : s.sizes()) cumulative.push_back(total += x);
  std::map<std::size_t, std::vector<std::size_t>> by_interval;
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < uniforms.size(); ++i) {
    const double u = uniforms[i];
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("paintbox: uniforms must lie in [0, 1)");
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
      blocks.push_back({i + 1});  // dust
    } else {
      by_interval[static_cast<std::size_t>(it - cumulative.begin())].push_back(i + 1);
    }
  }
  for (auto& [k, members] : by_interval) blocks.push_back(std::move(members));
  return PartitionOfN(uniforms.size(), std::move(blocks));
}

PartitionOfN paintbox(const MassPartition& s, std::size_t n, RngStream& rng) {
  if (n == 0) throw DomainError("paintbox: n must be positive");
  std::vector<double> u(n);
  for (auto& v : u) v = rng.uniform();
  return paintbox(s, u);
}

void write_partition(std::ostream& os, const PartitionOfN& partition) {
  for (const auto& block : partition.blocks()) {
    for (std::size_t j = 0; j < block.size(); ++j) os << (j ? "," : "") << block[j];
    os << '\n';
  }
}

IntervalFragmentation IntervalFragmentation::from_event_log(const EventLog& log, std::vector<double> tags) {
  for (double y : tags)
    if (!(y > 0.0 && y < 1.0)) throw DomainError("interval fragmentation: tags must lie in (0, 1)");
  IntervalFragmentation g;
  g.alpha_ = log.alpha();
  g.tags_ = std::move(tags);
  const auto& nodes = log.nodes();
  g.intervals_.resize(nodes.size());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    auto& rec = g.intervals_[i];
    rec.log_size = n.mark.log_size;
    rec.birth = n.mark.birth;
    rec.parent = n.parent;
    rec.first_child = n.first_child;
    rec.child_count = n.child_count;
    switch (n.state) {
      case NodeState::split: rec.death = n.mark.death(); break;
      case NodeState::alive: rec.censor = log.horizon(); break;
      case NodeState::screened:
        rec.screened = true;
        rec.death = rec.birth;
        break;
    }
    if (n.state != NodeState::split) continue;
    const double left = rec.left, right = rec.right, width = right - left;
    double cumulative = 0.0;
    for (auto c = n.first_child; c < n.first_child + n.child_count; ++c) {
      auto& child = g.intervals_[c];
      child.left = std::min(left + width * cumulative, right);
      cumulative += std::exp(nodes[c].mark.log_size - n.mark.log_size);
      child.right = std::min(left + width * cumulative, right);
    }
  }
  return g;
}

std::vector<std::uint32_t> IntervalFragmentation::alive_at(double t) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < intervals_.size(); ++i) {
    const auto& r = intervals_[i];
    if (r.screened || r.birth > t || t >= r.death) continue;
    if (t > r.censor) throw TruncationError("interval fragmentation: time beyond the recorded history");
    out.push_back(i);
  }
  return out;
}

MassPartition IntervalFragmentation::ranked_at(double t) const {
  std::vector<double> logs;
  for (auto i : alive_at(t)) logs.push_back(intervals_[i].log_size);
  return MassPartition::from_log_sizes(std::move(logs));
}

std::optional<std::uint32_t> IntervalFragmentation::interval_containing(double y, double t) const {
  if (t < 0.0) throw DomainError("interval fragmentation: negative time");
  std::uint32_t cur = 0;
  for (;;) {
    const auto& r = intervals_[cur];
    if (r.screened) return std::nullopt;
    if (t < r.death) {
      if (t > r.censor) throw TruncationError("interval fragmentation: time beyond the recorded history");
      return cur;
    }
    std::optional<std::uint32_t> next;
    for (auto c = r.first_child; c < r.first_child + r.child_count; ++c)
      if (intervals_[c].left <= y && y < intervals_[c].right) {
        next = c;
        break;
      }
    if (!next) return std::nullopt;
    cur = *next;
  }
}

PartitionOfN IntervalFragmentation::partition_at(double t) const {
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (auto k = interval_containing(tags_[i], t))
      groups[*k].push_back(i + 1);
    else
      blocks.push_back({i + 1});
  }
  for (auto& [k, members] : groups) blocks.push_back(std::move(members));
  return PartitionOfN(tags_.size(), std::move(blocks));
}

bool IntervalFragmentation::nested() const {
  for (const auto& r : intervals_)
    for (auto c = r.first_child; c < r.first_child + r.child_count; ++c) {
      const auto& child = intervals_[c];
      if (child.left < r.left || child.right > r.right || child.left > child.right) return false;
      if (child.birth != r.death) return false;
    }
  return true;
}

IntervalFragmentation time_change(const IntervalFragmentation& homogeneous, double alpha) {
  if (homogeneous.alpha() != 0.0) throw PreconditionError("time_change: input must be homogeneous");
  IntervalFragmentation out = homogeneous;
  out.alpha_ = alpha;
  if (alpha == 0.0) return out;
  for (std::size_t i = 0; i < out.intervals_.size(); ++i) {
    const auto& src = homogeneous.intervals_[i];
    auto& dst = out.intervals_[i];
    dst.birth = src.parent == 0xffffffffu ? 0.0 : out.intervals_[src.parent].death;
    const double scale = std::exp(-alpha * src.log_size);
    if (src.screened) {
      dst.death = dst.birth;
    } else if (std::isfinite(src.death)) {
      dst.death = dst.birth + (src.death - src.birth) * scale;
    } else {
      dst.censor = std::isfinite(src.censor) ? dst.birth + (src.censor - src.birth) * scale : kInf;
    }
  }
  return out;
}

std::vector<PartitionOfN> partition_process(const SimConfig& cfg, std::size_t n,
                                            std::span<const double> times, const RngStream& rng) {
  if (n == 0) throw DomainError("partition_process: n must be positive");
  RngStream tag_stream = rng.substream(0x7a6773ULL);
  std::vector<double> tags(n);
  for (auto& y : tags) y = tag_stream.uniform();
  const auto g = IntervalFragmentation::from_event_log(run(cfg, rng), std::move(tags));
  std::vector<PartitionOfN> out;
  for (double t : times) out.push_back(g.partition_at(t));
  return out;
}

double TaggedPath::log_at(double t) const {
  if (t < 0.0 || t > horizon) throw DomainError("tagged path: time outside [0, horizon]");
  const auto k = static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) -
                                          jump_times.begin());
  const double l = log_sizes[k];
  return l == kNegInf ? kNegInf : l - erosion * t;
}

namespace {

// Moves the tag into the child holding its relative position u; returns the
// log-ratio of that child or -inf when u lies in lost mass.
double follow_tag(std::span<const double> log_ratios, double& u) {
  double cumulative = 0.0;
  for (double l : log_ratios) {
    const double s = std::exp(l);
    if (u < cumulative + s) {
      u = std::min((u - cumulative) / s, std::nextafter(1.0, 0.0));
      return l;
    }
    cumulative += s;
  }
  return kNegInf;
}

}  // namespace

TaggedPath tagged_path(const SimConfig& cfg, double horizon, RngStream& rng) {
  if (!cfg.law) throw PreconditionError("tagged_path: missing law");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw DomainError("tagged_path: invalid horizon");
  if (cfg.erosion > 0.0 && cfg.alpha != 0.0) throw PreconditionError("tagged_path: erosion requires alpha = 0");
  const bool screening = cfg.mode == SimMode::threshold;
  if (!screening && cfg.alpha < 0.0) throw PreconditionError("tagged_path: alpha < 0 needs threshold mode");
  const double log_eps = screening ? std::log(cfg.epsilon) : kNegInf;

  TaggedPath path;
  path.erosion = cfg.erosion;
  path.horizon = horizon;
  path.log_sizes.push_back(0.0);
  double u = rng.uniform();
  // Erosion removes mass uniformly, so the tag itself falls into the dust
  // at rate c.
  const double eroded_at = cfg.erosion > 0.0 ? rng.exponential() / cfg.erosion : kInf;
  double l = 0.0, t = 0.0;
  std::vector<double> logs;
  for (;;) {
    t += rng.exponential() * std::exp(-cfg.alpha * l);
    if (eroded_at <= std::min(t, horizon)) {
      path.jump_times.push_back(eroded_at);
      path.log_sizes.push_back(kNegInf);
      break;
    }
    if (t > horizon) break;
    cfg.law->sample_log_ratios(rng, logs);
    const double step = follow_tag(logs, u);
    l = step == kNegInf ? kNegInf : l + step;
    if (l <= log_eps) l = kNegInf;
    path.jump_times.push_back(t);
    path.log_sizes.push_back(l);
    if (l == kNegInf) break;
  }
  return path;
}

double homogeneous_lineage_log(const DislocationLaw& law, double duration, RngStream& rng) {
  double u = rng.uniform();
  double l = 0.0, t = 0.0;
  std::vector<double> logs;
  for (;;) {
    t += rng.exponential();
    if (t > duration) return l;
    law.sample_log_ratios(rng, logs);
    const double step = follow_tag(logs, u);
    if (step == kNegInf) return kNegInf;
    l += step;
  }
}

MassPartition apply_atom(const MassPartition& state, const PoissonAtom& atom) {
  if (atom.index < 1) throw DomainError("apply_atom: index must be >= 1");
  if (atom.index > state.size()) return state;
  std::vector<double> logs(state.log_sizes().begin(), state.log_sizes().end());
  const double parent = logs[atom.index - 1];
  logs.erase(logs.begin() + static_cast<std::ptrdiff_t>(atom.index - 1));
  for (double l : atom.ratios.log_sizes()) logs.push_back(parent + l);
  return MassPartition::from_log_sizes(std::move(logs));
}

PoissonianRun poissonian_run(const DislocationLaw& law, double erosion, std::span<const double> times,
                             RngStream& rng, std::uint64_t event_budget) {
  ErosionParams{erosion}.validate();
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw DomainError("poissonian_run: times must be sorted and nonnegative");
  PoissonianRun out;
  MassPartition state = MassPartition::from_log_sizes({0.0});
  double t = 0.0;
  double next = rng.exponential() / static_cast<double>(state.size());
  std::uint64_t events = 0;
  for (double target : times) {
    while (!state.empty() && next <= target) {
      if (++events > event_budget) throw BudgetExceeded("poissonian_run: event budget exceeded");
      t = next;
      const auto k = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(state.size()));
      PoissonAtom atom{law.sample(rng), std::min(k, state.size()), t};
      state = apply_atom(state, atom);
      out.atoms.push_back(std::move(atom));
      next = state.empty() ? kInf : t + rng.exponential() / static_cast<double>(state.size());
    }
    std::vector<double> logs(state.log_sizes().begin(), state.log_sizes().end());
    for (auto& l : logs) l -= erosion * target;
    out.states.push_back(MassPartition::from_log_sizes(std::move(logs)));
  }
  return out;
}

}  // namespace fragchain
