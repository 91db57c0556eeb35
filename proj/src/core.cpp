#include "fragchain/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace fragchain {

namespace {

void sort_descending(std::vector<double>& logs) {
  std::sort(logs.begin(), logs.end(), std::greater<>());
}

double sum_sizes(std::span<const double> logs) {
  // Smallest first keeps the sum accurate for long tails.
  double total = 0.0;
  for (auto it = logs.rbegin(); it != logs.rend(); ++it) total += std::exp(*it);
  return total;
}

}  // namespace

MassPartition MassPartition::from_log_sizes(std::vector<double> log_sizes) {
  std::erase_if(log_sizes, [](double v) { return v == kNegInf; });
  for (double v : log_sizes) {
    if (std::isnan(v) || v == kInf) throw DomainError("mass partition: non-finite log-size");
    if (v > kMassTolerance) throw DomainError("mass partition: entry larger than one");
  }
  sort_descending(log_sizes);
  if (sum_sizes(log_sizes) > 1.0 + kMassTolerance)
    throw DomainError("mass partition: total mass exceeds one");
  return MassPartition(std::move(log_sizes));
}

double MassPartition::size_at(std::size_t i) const { return std::exp(logs_[i]); }

std::vector<double> MassPartition::sizes() const {
  std::vector<double> out(logs_.size());
  std::transform(logs_.begin(), logs_.end(), out.begin(), [](double v) { return std::exp(v); });
  return out;
}

double MassPartition::total_mass() const { return sum_sizes(logs_); }

MassPartition rank(std::span<const double> raw) {
  std::vector<double> logs;
  logs.reserve(raw.size());
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("rank: entries must be finite and nonnegative");
    if (v > 0.0) logs.push_back(std::log(v));
  }
  return MassPartition::from_log_sizes(std::move(logs));
}

MassPartition merge_families(std::span<const MassPartition> families) {
  std::vector<double> logs;
  for (const auto& f : families) logs.insert(logs.end(), f.log_sizes().begin(), f.log_sizes().end());
  return MassPartition::from_log_sizes(std::move(logs));
}

double dust_mass(const MassPartition& x) {
  const double d = 1.0 - x.total_mass();
  if (d < 0.0 && d >= -kMassTolerance) return 0.0;
  return d;
}

NodeLabel::NodeLabel(std::vector<std::uint32_t> path) : path_(std::move(path)) {
  for (auto i : path_)
    if (i == 0) throw DomainError("node label: child indices start at 1");
}

NodeLabel NodeLabel::parent() const {
  if (is_root()) throw DomainError("node label: root has no parent");
  return NodeLabel(std::vector<std::uint32_t>(path_.begin(), path_.end() - 1));
}

NodeLabel NodeLabel::child(std::uint32_t i) const {
  auto p = path_;
  p.push_back(i);
  return NodeLabel(std::move(p));
}

std::string NodeLabel::to_string() const {
  if (is_root()) return "root";
  std::ostringstream os;
  for (std::size_t k = 0; k < path_.size(); ++k) {
    if (k) os << '.';
    os << path_[k];
  }
  return os.str();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
  splitmix64(s);
  return splitmix64(s);
}

std::uint64_t child_key(std::uint64_t parent_key, std::uint32_t child_index) {
  return mix64(parent_key, child_index);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index) {
  std::uint64_t sm = mix64(seed, stream_index);
  for (auto& w : s_) w = splitmix64(sm);
}

RngStream::result_type RngStream::operator()() {
  const auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  // 53 random bits shifted by half an ulp: never 0, never 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform()); }

RngStream RngStream::substream(std::uint64_t key) const {
  return RngStream(seed_, mix64(stream_index_, key));
}

RngStream node_stream(const RngStream& replica, std::uint64_t node_key) {
  return replica.substream(node_key);
}

}  // namespace fragchain
