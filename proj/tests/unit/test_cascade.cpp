#include <doctest.h>

#include <cmath>
#include <map>

#include "fragchain/cascade.hpp"
#include "fragchain/engine.hpp"

using namespace fragchain;

TEST_CASE("tree marks coincide with the engine") {
  SimConfig cfg;
  cfg.law = uniform_binary();
  cfg.horizon = 2.0;
  cfg.seed = 21;
  for (std::size_t r = 0; r < 5; ++r) {
    const RngStream rng(cfg.seed, r);
    const auto log = run(cfg, rng);
    const auto tree = grow(*cfg.law, 0.0, 6, rng);
    std::map<std::uint64_t, TreeMark> marks;
    for (const auto& n : tree.nodes()) marks[n.key] = n.mark;
    std::size_t compared = 0;
    for (const auto& n : log.nodes()) {
      const auto it = marks.find(n.key);
      if (it == marks.end()) continue;
      CHECK(it->second.log_size == n.mark.log_size);
      CHECK(it->second.birth == n.mark.birth);
      if (n.state == NodeState::split) CHECK(it->second.lifetime == n.mark.lifetime);
      ++compared;
    }
    CHECK(compared > 1);
  }
}

TEST_CASE("time slice agrees with the engine") {
  SimConfig cfg;
  cfg.law = dirichlet_k(3, 1.0);
  cfg.horizon = 1.5;
  cfg.seed = 8;
  for (std::size_t r = 0; r < 10; ++r) {
    const RngStream rng(cfg.seed, r);
    GrowLimits limits;
    limits.max_death = cfg.horizon;
    const auto tree = grow(*cfg.law, 0.0, limits, rng);
    const auto a = time_slice(tree, 1.5).sizes();
    const auto b = run(cfg, rng).fragments_at(1.5).sizes();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("shallow trees refuse late slices") {
  const auto tree = grow(*uniform_binary(), 0.0, 1, RngStream(1, 0));
  CHECK(tree.depth() == 1);
  CHECK(tree.generation(1).size() == 2);
  CHECK_THROWS_AS(time_slice(tree, 50.0), TruncationError);
  CHECK_THROWS_AS(tree.generation(2), DomainError);
}

TEST_CASE("intrinsic martingale of a conservative law is one") {
  const auto tree = grow(*dirichlet_k(4, 0.5), 0.0, 5, RngStream(2, 0));
  const auto m = intrinsic_martingale(tree, 1.0);
  REQUIRE(m.values.size() == 6);
  for (double v : m.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("labels follow the Ulam-Harris scheme") {
  const auto tree = grow(*uniform_binary(), 0.0, 2, RngStream(3, 0));
  CHECK(tree.label(0).is_root());
  for (std::uint32_t i = 0; i < tree.nodes().size(); ++i) CHECK(tree.label(i).generation() == tree.nodes()[i].generation);
}

TEST_CASE("root only and deterministic trees") {
  const auto root = grow(*uniform_binary(), 0.0, 0, RngStream(4, 0));
  CHECK(root.nodes().size() == 1);
  CHECK(root.nodes()[0].mark.log_size == 0.0);
  CHECK(intrinsic_martingale(root, 1.0).values == std::vector<double>{1.0});
  const auto det = grow(*deterministic_binary(0.5), 0.0, 3, RngStream(4, 0));
  REQUIRE(det.generation(3).size() == 8);
  for (const auto& n : det.generation(3)) CHECK(std::exp(n.mark.log_size) == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("mark algebra is exact") {
  const auto tree = grow(*dirichlet_k(3, 1.0), 0.7, 5, RngStream(5, 0));
  for (const auto& n : tree.nodes()) {
    if (n.generation == 0) continue;
    const auto& p = tree.nodes()[n.parent];
    CHECK(n.mark.log_size == p.mark.log_size + n.log_ratio);
    CHECK(n.mark.birth == p.mark.birth + p.mark.lifetime);
  }
}

TEST_CASE("intrinsic martingale has unit mean and growing variance") {
  const auto trees = 4000;
  for (const auto& law : {lossy_binary(), dirichlet_k(3, 0.5)}) {
    const double p_star = KappaFunction(law).malthusian();
    std::vector<std::vector<double>> by_gen(9);
    for (int r = 0; r < trees; ++r) {
      const auto m = intrinsic_martingale(grow(*law, 0.0, 8, RngStream(6, r)), p_star);
      for (std::size_t n = 0; n < m.values.size(); ++n) by_gen[n].push_back(m.values[n]);
    }
    double previous_var = 0.0;
    for (std::size_t n = 1; n < by_gen.size(); ++n) {
      const auto est = estimate_mean(by_gen[n]);
      CHECK(std::abs(est.mean - 1.0) < 4.0 * est.std_error + 1e-12);
      const double var = est.std_error * est.std_error * static_cast<double>(est.n);
      // the variance of a martingale only grows; allow sampling slack
      CHECK(var >= 0.9 * previous_var);
      CHECK(var < 10.0);
      previous_var = var;
    }
  }
}

TEST_CASE("fragment counts at t = 1 match the engine") {
  SimConfig cfg;
  cfg.law = uniform_binary();
  cfg.horizon = 1.0;
  cfg.seed = 12;
  GrowLimits limits;
  limits.max_death = 1.0;
  std::vector<double> a(8, 0.0), b(8, 0.0);
  for (std::size_t r = 0; r < 10'000; ++r) {
    const auto x = time_slice(grow(*cfg.law, 0.0, limits, RngStream(99, r)), 1.0);
    a[std::min<std::size_t>(x.size(), 7)] += 1.0;
    b[std::min<std::size_t>(run(cfg, r).fragments_at(1.0).size(), 7)] += 1.0;
  }
  CHECK(chi2_homogeneity(a, b).pass);
}

TEST_CASE("energy on the tree equals energy on the engine log") {
  const double eps = 0.01;
  const auto quadratic = CostSpec{[](const MassPartition& s) { return s.size_at(0); }, 2.0};
  SimConfig cfg;
  cfg.law = dirichlet_k(3, 1.0);
  cfg.mode = SimMode::threshold;
  cfg.epsilon = eps;
  cfg.horizon = kInf;
  cfg.seed = 13;
  for (std::size_t r = 0; r < 20; ++r) {
    const RngStream rng(cfg.seed, r);
    GrowLimits limits;
    limits.min_log_size = std::log(eps);
    const auto tree = grow(*cfg.law, 0.0, limits, rng);
    const double from_tree = energy_cost(tree, quadratic, eps);
    const double from_log = energy_cost(run(cfg, rng), quadratic, eps);
    CHECK(from_tree == doctest::Approx(from_log).epsilon(1e-12));
  }
  GrowLimits shallow;
  shallow.max_generation = 1;
  CHECK_THROWS_AS(energy_cost(grow(*cfg.law, 0.0, shallow, RngStream(1, 0)), quadratic, eps), TruncationError);
}

TEST_CASE("martingale proxy has stabilized by generation 12") {
  const auto law = lossy_binary();
  const double p_star = KappaFunction(law).malthusian();
  std::vector<double> change, m10, m12;
  for (int r = 0; r < 2000; ++r) {
    const auto m = intrinsic_martingale(grow(*law, 0.0, 12, RngStream(14, r)), p_star).values;
    m10.push_back(m[10]);
    m12.push_back(m[12]);
    if (m[10] > 0.0) change.push_back(std::abs(m[12] - m[10]) / m[10]);
  }
  const auto a = estimate_mean(m10), b = estimate_mean(m12);
  const double sd10 = a.std_error * std::sqrt(double(a.n)), sd12 = b.std_error * std::sqrt(double(b.n));
  // The proxy only enters through its law, so stability is judged on the
  // distribution; individual paths still move by about 1.5%.
  CHECK(std::abs(sd12 / sd10 - 1.0) < 0.01);
  CHECK(std::abs(b.mean / a.mean - 1.0) < 0.01);
  CHECK(ks_statistic(m10, m12) < 0.01);
  CHECK(estimate_mean(change).mean < 0.05);
}
