#include "fragchain/duality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fragchain/io.hpp"

namespace fragchain {

std::size_t CutProcess::count_at(double t) const {
  if (t < 0.0 || t > horizon) throw DomainError("cut process: time outside [0, horizon]");
  return static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

namespace {

std::vector<double> spacings(std::vector<double> positions) {
  std::sort(positions.begin(), positions.end());
  std::vector<double> out;
  out.reserve(positions.size() + 1);
  double left = 0.0;
  for (double c : positions) {
    out.push_back(c - left);
    left = c;
  }
  out.push_back(1.0 - left);
  return out;
}

}  // namespace

std::vector<double> CutProcess::lengths_at(double t) const {
  const auto n = count_at(t);
  return spacings(std::vector<double>(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(n)));
}

MassPartition CutProcess::at(double t) const { return rank(lengths_at(t)); }

CutProcess build_cut_process(double horizon, RngStream& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("build_cut_process: horizon must be positive");
  CutProcess p;
  p.horizon = horizon;
  for (double t = rng.exponential(); t <= horizon; t += rng.exponential()) {
    p.times.push_back(t);
    p.cuts.push_back(rng.uniform());
  }
  return p;
}

std::vector<double> coalescent_grid(double s_max, std::size_t points) {
  if (!(s_max > 0.0) || points < 2) throw DomainError("coalescent_grid: need s_max > 0 and two points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) grid[k] = s_max * static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

CoalescentTrajectory reverse(const CutProcess& cuts, std::span<const double> grid) {
  if (cuts.horizon != 1.0) throw PreconditionError("reverse: the cut process must run to time 1");
  if (!std::is_sorted(grid.begin(), grid.end()) || (!grid.empty() && grid.front() < 0.0))
    throw DomainError("reverse: grid must be sorted and nonnegative");
  CoalescentTrajectory out;
  out.grid.assign(grid.begin(), grid.end());
  for (double s : grid) out.states.push_back(cuts.at(std::exp(-s)));

  std::vector<double> present(cuts.cuts.begin(), cuts.cuts.end());
  std::sort(present.begin(), present.end());
  for (std::size_t k = cuts.cuts.size(); k-- > 0;) {
    const double cut = cuts.cuts[k];
    const auto lengths = spacings(present);
    const auto pos = static_cast<std::size_t>(std::lower_bound(present.begin(), present.end(), cut) - present.begin());
    // Rank blocks by decreasing length, ties by position.
    std::vector<std::size_t> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return lengths[a] > lengths[b]; });
    std::vector<std::size_t> rank_of(lengths.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = r + 1;

    MergeEvent m;
    m.coal_time = -std::log(cuts.times[k]);
    m.n_before = lengths.size();
    m.rank_i = std::min(rank_of[pos], rank_of[pos + 1]);
    m.rank_j = std::max(rank_of[pos], rank_of[pos + 1]);
    m.cut = cut;
    out.merges.push_back(m);
    present.erase(present.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return out;
}

CutProcess reverse_to_cuts(std::span<const MergeEvent> merges, double horizon) {
  CutProcess p;
  p.horizon = horizon;
  for (auto it = merges.rbegin(); it != merges.rend(); ++it) {
    p.times.push_back(std::exp(-it->coal_time));
    p.cuts.push_back(it->cut);
  }
  if (!std::is_sorted(p.times.begin(), p.times.end()))
    throw DomainError("reverse_to_cuts: merges are not in coalescent order");
  return p;
}

void write_merge_csv(std::ostream& os, std::span<const std::vector<MergeEvent>> replicas) {
  os << "replica,coal_time,n_before,rank_i,rank_j\n";
  for (std::size_t r = 0; r < replicas.size(); ++r)
    for (const auto& m : replicas[r])
      os << r << ',' << format_double(m.coal_time) << ',' << m.n_before << ',' << m.rank_i << ',' << m.rank_j
         << '\n';
}

}  // namespace fragchain
