#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fragchain/core.hpp"

namespace fragchain {

/// (0,1) cut at the arrival times of a unit-rate Poisson process, the i-th
/// cut falling at an independent uniform position.
struct CutProcess {
  /// Arrival times, increasing, all ≤ horizon.
  std::vector<double> times;
  /// Cut positions in arrival order.
  std::vector<double> cuts;
  double horizon = 0.0;

  /// N_t.
  std::size_t count_at(double t) const;
  /// Interval lengths left to right after the first N_t cuts.
  std::vector<double> lengths_at(double t) const;
  /// F(t), the ranked lengths.
  MassPartition at(double t) const;
};

CutProcess build_cut_process(double horizon, RngStream& rng);

/// Removal of one cut in coalescent time.
struct MergeEvent {
  double coal_time = 0.0;
  /// Blocks just before the merge.
  std::size_t n_before = 0;
  /// Ranks (1 = largest) of the merged blocks among the n_before blocks,
  /// rank_i < rank_j.
  std::size_t rank_i = 0;
  std::size_t rank_j = 0;
  /// Position of the removed cut.
  double cut = 0.0;
};

struct CoalescentTrajectory {
  std::vector<double> grid;
  /// C(s) = F(e^{-s}) at each grid point.
  std::vector<MassPartition> states;
  /// All cut removals in coalescent order.
  std::vector<MergeEvent> merges;
};

/// Logarithmic coalescent grid s_k = k·s_max/(points-1), i.e. fragmentation
/// times e^{-s} from 1 down to e^{-s_max}.
std::vector<double> coalescent_grid(double s_max = 8.0, std::size_t points = 81);

/// Exponential time reversal C(s) = F(e^{-s}). Needs horizon 1 so that
/// coalescent time starts at 0.
CoalescentTrajectory reverse(const CutProcess& cuts, std::span<const double> grid);

/// Inverse of the merge bookkeeping: rebuilds the cut history from merges.
CutProcess reverse_to_cuts(std::span<const MergeEvent> merges, double horizon = 1.0);

/// replica,coal_time,n_before,rank_i,rank_j
void write_merge_csv(std::ostream& os, std::span<const std::vector<MergeEvent>> replicas);

}  // namespace fragchain
