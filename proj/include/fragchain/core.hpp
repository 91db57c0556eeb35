#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fragchain {

/// Tolerance on the total mass of a partition (Σ s_i ≤ 1 + kMassTolerance).
inline constexpr double kMassTolerance = 1e-12;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy. Callers (the CLI in particular) map each type to its own
// exit code, so keep them distinct.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ranked sequence of positive masses with total at most one.
///
/// Sizes are held as natural logarithms so that fragments of size e^-40 and
/// smaller survive long horizons. Zeros are represented by absence.
class MassPartition {
 public:
  MassPartition() = default;

  /// Builds from log-sizes in any order. Entries equal to -inf are dropped.
  static MassPartition from_log_sizes(std::vector<double> log_sizes);

  std::span<const double> log_sizes() const { return logs_; }
  std::size_t size() const { return logs_.size(); }
  bool empty() const { return logs_.empty(); }

  double log_size(std::size_t i) const { return logs_[i]; }
  double size_at(std::size_t i) const;
  /// Linear sizes, ranked.
  std::vector<double> sizes() const;
  double total_mass() const;

  bool operator==(const MassPartition&) const = default;

 private:
  explicit MassPartition(std::vector<double> ranked) : logs_(std::move(ranked)) {}
  std::vector<double> logs_;
};

/// Decreasing rearrangement of nonnegative reals; zeros are dropped.
MassPartition rank(std::span<const double> raw);
/// Ranked union of several families.
MassPartition merge_families(std::span<const MassPartition> families);
/// 1 - Σ s_i, clamped at zero when within tolerance below it.
double dust_mass(const MassPartition& x);

/// Ulam-Harris address of a node in the genealogical tree.
class NodeLabel {
 public:
  NodeLabel() = default;
  explicit NodeLabel(std::vector<std::uint32_t> path);

  std::span<const std::uint32_t> path() const { return path_; }
  std::size_t generation() const { return path_.size(); }
  bool is_root() const { return path_.empty(); }
  NodeLabel parent() const;
  NodeLabel child(std::uint32_t i) const;
  /// "root" for the empty path, otherwise dot separated, e.g. "1.2.1".
  std::string to_string() const;

  auto operator<=>(const NodeLabel&) const = default;
  bool operator==(const NodeLabel&) const = default;

 private:
  std::vector<std::uint32_t> path_;
};

/// Marks (ξ_u, a_u, ζ_u) attached to a node: size, birth time and lifetime.
struct TreeMark {
  double log_size = 0.0;
  double birth = 0.0;
  double lifetime = 0.0;

  double death() const { return birth + lifetime; }
};

std::uint64_t splitmix64(std::uint64_t& state);
/// Stateless 64-bit mixer; used to derive stream indices.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// Key of the root node; children keys are derived with child_key.
inline constexpr std::uint64_t kRootKey = 0x6a09e667f3bcc909ULL;
std::uint64_t child_key(std::uint64_t parent_key, std::uint32_t child_index);

/// Deterministic random stream identified by (seed, stream_index).
///
/// xoshiro256** seeded through splitmix64. Satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard exponential.
  double exponential();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Independent stream derived from this one's identity and a key; the
  /// current position of this stream is irrelevant.
  RngStream substream(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::uint64_t s_[4];
};

/// Stream owned by one genealogical node of one replica. Engine and cascade
/// draw a node's lifetime and dislocation from this stream, so both
/// constructions see identical randomness for identical (seed, replica).
RngStream node_stream(const RngStream& replica, std::uint64_t node_key);

}  // namespace fragchain
