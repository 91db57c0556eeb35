#include <doctest.h>

#include <cmath>
#include <set>

#include "fragchain/core.hpp"

using namespace fragchain;

TEST_CASE("mass partition ranks log-sizes and drops zeros") {
  const auto x = MassPartition::from_log_sizes({std::log(0.25), kNegInf, std::log(0.5), std::log(0.125)});
  REQUIRE(x.size() == 3);
  CHECK(x.size_at(0) == doctest::Approx(0.5));
  CHECK(x.size_at(1) == doctest::Approx(0.25));
  CHECK(x.size_at(2) == doctest::Approx(0.125));
  CHECK(x.total_mass() == doctest::Approx(0.875));
  CHECK(dust_mass(x) == doctest::Approx(0.125));
  CHECK(MassPartition::from_log_sizes({}).empty());
}

TEST_CASE("mass partition rejects invalid input") {
  CHECK_THROWS_AS(MassPartition::from_log_sizes({std::log(0.7), std::log(0.4)}), DomainError);
  CHECK_THROWS_AS(MassPartition::from_log_sizes({0.1}), DomainError);
  CHECK_THROWS_AS(MassPartition::from_log_sizes({std::nan("")}), DomainError);
  CHECK_THROWS_AS(MassPartition::from_log_sizes({kInf}), DomainError);
  // rounding slack of the unit total
  CHECK_NOTHROW(MassPartition::from_log_sizes({std::log(0.3), std::log(0.7 + 1e-14)}));
}

TEST_CASE("rank and merge_families") {
  const std::vector<double> raw = {0.1, 0.0, 0.6, 0.3};
  const auto x = rank(raw);
  CHECK(x.size() == 3);
  CHECK(x.size_at(0) == doctest::Approx(0.6));
  const std::vector<double> bad = {0.5, -0.1};
  CHECK_THROWS_AS(rank(bad), DomainError);

  const std::vector<MassPartition> families = {MassPartition::from_log_sizes({std::log(0.2)}),
                                               MassPartition::from_log_sizes({std::log(0.3), std::log(0.1)})};
  const auto merged = merge_families(families);
  REQUIRE(merged.size() == 3);
  CHECK(merged.size_at(0) == doctest::Approx(0.3));
  CHECK(merged.size_at(2) == doctest::Approx(0.1));
}

TEST_CASE("Ulam-Harris labels") {
  const NodeLabel root;
  CHECK(root.is_root());
  CHECK(root.to_string() == "root");
  const auto u = root.child(1).child(2).child(1);
  CHECK(u.to_string() == "1.2.1");
  CHECK(u.generation() == 3);
  CHECK(u.parent().to_string() == "1.2");
  CHECK_THROWS_AS(root.parent(), DomainError);
  CHECK_THROWS_AS(root.child(0), DomainError);
  CHECK(root.child(1) < root.child(2));
  CHECK(root.child(1).child(5) < root.child(2));
  CHECK(root < root.child(1));
}

TEST_CASE("tree mark death") {
  const TreeMark m{std::log(0.5), 1.5, 0.25};
  CHECK(m.death() == 1.75);
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differ_c |= x != c();
    differ_d |= x != d();
  }
  CHECK(differ_c);
  CHECK(differ_d);
}

TEST_CASE("uniform lies in the open unit interval and exponential has mean one") {
  RngStream rng(1, 0);
  double sum = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += rng.exponential();
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("node streams depend only on replica and key") {
  const RngStream replica(9, 2);
  auto s1 = node_stream(replica, child_key(kRootKey, 1));
  auto s2 = node_stream(RngStream(9, 2), child_key(kRootKey, 1));
  CHECK(s1() == s2());
  std::set<std::uint64_t> keys;
  for (std::uint32_t i = 1; i <= 100; ++i) keys.insert(child_key(kRootKey, i));
  CHECK(keys.size() == 100);
  CHECK(child_key(child_key(kRootKey, 1), 2) != child_key(child_key(kRootKey, 2), 1));
}

TEST_CASE("rank is idempotent and merging is order free") {
  RngStream rng(3, 0);
  std::vector<double> raw(20);
  for (auto& v : raw) v = rng.uniform() / 40.0;
  const auto once = rank(raw);
  const auto sizes = once.sizes();
  CHECK(rank(sizes) == once);

  const auto a = MassPartition::from_log_sizes({std::log(0.2), std::log(0.05)});
  const auto b = MassPartition::from_log_sizes({std::log(0.3)});
  const auto c = MassPartition::from_log_sizes({std::log(0.1), std::log(0.1)});
  const std::vector<MassPartition> abc = {a, b, c}, cba = {c, b, a};
  const std::vector<MassPartition> ab = {a, b};
  const std::vector<MassPartition> ab_c = {merge_families(ab), c};
  CHECK(merge_families(abc) == merge_families(cba));
  CHECK(merge_families(abc) == merge_families(ab_c));
  CHECK(dust_mass(merge_families(abc)) == doctest::Approx(1.0 - 0.75).epsilon(1e-12));
}
