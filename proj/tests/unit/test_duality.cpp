#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fragchain/duality.hpp"
#include "fragchain/stats.hpp"

using namespace fragchain;

TEST_CASE("cut process bookkeeping") {
  RngStream rng(1, 0);
  const auto cuts = build_cut_process(2.0, rng);
  CHECK(cuts.at(0.0).size() == 1);
  CHECK(cuts.count_at(2.0) == cuts.times.size());
  CHECK(std::is_sorted(cuts.times.begin(), cuts.times.end()));
  const auto lengths = cuts.lengths_at(2.0);
  CHECK(lengths.size() == cuts.times.size() + 1);
  double total = 0.0;
  for (double l : lengths) total += l;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(cuts.count_at(3.0), DomainError);
}

TEST_CASE("piece count is one plus a Poisson count") {
  RngStream rng(2, 0);
  std::vector<double> pieces;
  for (int i = 0; i < 4000; ++i) pieces.push_back(static_cast<double>(build_cut_process(2.0, rng).at(2.0).size()));
  const auto m = estimate_mean(pieces);
  CHECK(std::abs(m.mean - 3.0) < 4.0 * m.std_error);
}

TEST_CASE("time reversal merges blocks") {
  RngStream rng(3, 0);
  const auto cuts = build_cut_process(1.0, rng);
  const auto grid = coalescent_grid();
  CHECK(grid.size() == 81);
  CHECK(grid.back() == 8.0);
  const auto traj = reverse(cuts, grid);
  REQUIRE(traj.states.size() == grid.size());
  CHECK(traj.states.front() == cuts.at(1.0));
  for (std::size_t k = 1; k < traj.states.size(); ++k) CHECK(traj.states[k].size() <= traj.states[k - 1].size());
  REQUIRE(traj.merges.size() == cuts.times.size());
  for (const auto& m : traj.merges) {
    CHECK(m.rank_i < m.rank_j);
    CHECK(m.rank_j <= m.n_before);
  }
}

TEST_CASE("reversal is an involution on the cut history") {
  RngStream rng(4, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto cuts = build_cut_process(1.0, rng);
    const auto back = reverse_to_cuts(reverse(cuts, coalescent_grid()).merges);
    REQUIRE(back.times.size() == cuts.times.size());
    for (std::size_t i = 0; i < cuts.times.size(); ++i) {
      CHECK(back.times[i] == doctest::Approx(cuts.times[i]).epsilon(1e-12));
      CHECK(back.cuts[i] == cuts.cuts[i]);
    }
  }
}

TEST_CASE("reversal needs a unit horizon") {
  RngStream rng(5, 0);
  const auto cuts = build_cut_process(2.0, rng);
  CHECK_THROWS_AS(reverse(cuts, coalescent_grid()), PreconditionError);
}

TEST_CASE("merge CSV") {
  const std::vector<std::vector<MergeEvent>> replicas = {{MergeEvent{0.5, 3, 1, 2, 0.4}}};
  std::ostringstream os;
  write_merge_csv(os, replicas);
  CHECK(os.str().rfind("replica,coal_time,n_before,rank_i,rank_j\n", 0) == 0);
  CHECK(os.str().find("0,0.5,3,1,2") != std::string::npos);
}

TEST_CASE("coalescent states keep unit mass") {
  RngStream rng(6, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto traj = reverse(build_cut_process(1.0, rng), coalescent_grid());
    for (const auto& s : traj.states) CHECK(s.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
}
