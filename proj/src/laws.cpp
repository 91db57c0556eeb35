#include "fragchain/laws.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace fragchain {

void DislocationLaw::sample_log_ratios(RngStream& rng, std::vector<double>& log_ratios) const {
  thread_local std::vector<double> raw;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    raw.clear();
    draw_ratios(rng, raw);
    log_ratios.clear();
    double total = 0.0;
    for (double s : raw) {
      if (!(s >= 0.0) || s > 1.0) throw DomainError(name() + ": ratio outside [0, 1]");
      if (s > 0.0) {
        log_ratios.push_back(std::log(s));
        total += s;
      }
    }
    if (total > 1.0 + kMassTolerance) throw DomainError(name() + ": ratios sum above one");
    if (log_ratios.size() == 1 && log_ratios[0] == 0.0) continue;  // neutral draw (1, 0, ...)
    std::sort(log_ratios.begin(), log_ratios.end(), std::greater<>());
    return;
  }
  throw DomainError(name() + ": law is concentrated on the neutral partition");
}

MassPartition DislocationLaw::sample(RngStream& rng) const {
  std::vector<double> logs;
  sample_log_ratios(rng, logs);
  return MassPartition::from_log_sizes(std::move(logs));
}

namespace {

class UniformBinary final : public DislocationLaw {
 public:
  std::string name() const override { return "uniform_binary"; }
  LawMetadata metadata() const override { return {true, false, 2}; }

  void draw_ratios(RngStream& rng, std::vector<double>& out) const override {
    const double v = rng.uniform();
    out.push_back(std::max(v, 1.0 - v));
    out.push_back(std::min(v, 1.0 - v));
  }

  std::optional<double> sigma_moment_closed(double p, int derivative) const override {
    const double q = p + 1.0;
    switch (derivative) {
      case 0: return 2.0 / q;
      case 1: return -2.0 / (q * q);
      case 2: return 4.0 / (q * q * q);
      default: return std::nullopt;
    }
  }

  std::optional<double> partial_moment_closed(double p, double x) const override {
    const double m = std::clamp(x, 0.0, 1.0);
    return 2.0 * std::pow(m, p + 1.0) / (p + 1.0);
  }

  std::optional<double> reproduction_closed(double t) const override {
    return t <= 0.0 ? 0.0 : 2.0 * -std::expm1(-t);
  }
};

// ln r / ln(1-r) rational with a small denominator means both ratios are
// powers of a common base.
bool is_lattice_pair(double a, double b) {
  if (a == b) return true;
  const double ratio = std::log(a) / std::log(b);
  for (int q = 1; q <= 64; ++q) {
    const double num = ratio * q;
    if (std::abs(num - std::round(num)) < 1e-10 * q) return true;
  }
  return false;
}

class DeterministicBinary final : public DislocationLaw {
 public:
  explicit DeterministicBinary(double r) : r_(r) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("deterministic_binary: r must lie in (0, 1)");
    a_ = std::max(r, 1.0 - r);
    b_ = std::min(r, 1.0 - r);
  }
  std::string name() const override { return "deterministic_binary"; }
  std::map<std::string, double> params() const override { return {{"r", r_}}; }
  LawMetadata metadata() const override { return {true, is_lattice_pair(a_, b_), 2}; }

  void draw_ratios(RngStream&, std::vector<double>& out) const override {
    out.push_back(a_);
    out.push_back(b_);
  }

  std::optional<double> sigma_moment_closed(double p, int derivative) const override {
    if (derivative < 0 || derivative > 2) return std::nullopt;
    const auto term = [&](double s) { return std::pow(std::log(s), derivative) * std::pow(s, p); };
    return term(a_) + term(b_);
  }

  std::optional<double> partial_moment_closed(double p, double x) const override {
    double total = 0.0;
    for (double s : {a_, b_})
      if (s < x) total += std::pow(s, p);
    return total;
  }

  std::optional<double> reproduction_closed(double t) const override {
    const double floor = std::exp(-t);
    return static_cast<double>((a_ >= floor) + (b_ >= floor));
  }

 private:
  double r_, a_, b_;
};

class LossyBinary final : public DislocationLaw {
 public:
  std::string name() const override { return "lossy_binary"; }
  LawMetadata metadata() const override { return {false, false, 2}; }

  void draw_ratios(RngStream& rng, std::vector<double>& out) const override {
    const double half = 0.5 * rng.uniform();
    out.push_back(half);
    out.push_back(half);
  }

  std::optional<double> sigma_moment_closed(double p, int derivative) const override {
    const double ln2 = std::numbers::ln2;
    const double f = 2.0 * std::exp2(-p);
    const double g = 1.0 / (p + 1.0);
    switch (derivative) {
      case 0: return f * g;
      case 1: return -ln2 * f * g - f * g * g;
      case 2: return ln2 * ln2 * f * g + 2.0 * ln2 * f * g * g + 2.0 * f * g * g * g;
      default: return std::nullopt;
    }
  }

  std::optional<double> partial_moment_closed(double p, double x) const override {
    const double m = std::clamp(x, 0.0, 0.5);
    return 4.0 * std::pow(m, p + 1.0) / (p + 1.0);
  }

  std::optional<double> reproduction_closed(double t) const override {
    return 2.0 * std::max(0.0, 1.0 - 2.0 * std::exp(-t));
  }
};

class DirichletK final : public DislocationLaw {
 public:
  DirichletK(std::size_t k, double a) : k_(k), a_(a) {
    if (k < 2) throw DomainError("dirichlet_k: need k >= 2");
    if (!(a > 0.0)) throw DomainError("dirichlet_k: need a > 0");
    b_ = static_cast<double>(k - 1) * a;
  }
  std::string name() const override { return "dirichlet_k"; }
  std::map<std::string, double> params() const override {
    return {{"k", static_cast<double>(k_)}, {"a", a_}};
  }
  LawMetadata metadata() const override { return {true, false, k_}; }

  void draw_ratios(RngStream& rng, std::vector<double>& out) const override {
    std::gamma_distribution<double> gamma(a_, 1.0);
    const auto first = out.size();
    double total = 0.0;
    for (std::size_t i = 0; i < k_; ++i) {
      out.push_back(gamma(rng));
      total += out.back();
    }
    for (auto i = first; i < out.size(); ++i) out[i] /= total;
  }

  std::optional<double> sigma_moment_closed(double p, int derivative) const override {
    const double ka = a_ + b_;
    const double base = static_cast<double>(k_) *
                        std::exp(std::lgamma(a_ + p) + std::lgamma(ka) - std::lgamma(a_) -
                                 std::lgamma(ka + p));
    const double d = boost::math::digamma(a_ + p) - boost::math::digamma(ka + p);
    switch (derivative) {
      case 0: return base;
      case 1: return base * d;
      case 2:
        return base * (d * d + boost::math::trigamma(a_ + p) - boost::math::trigamma(ka + p));
      default: return std::nullopt;
    }
  }

  std::optional<double> partial_moment_closed(double p, double x) const override {
    if (x <= 0.0) return 0.0;
    const double full = *sigma_moment_closed(p, 0);
    if (x >= 1.0) return full;
    return full * boost::math::ibeta(a_ + p, b_, x);
  }

  std::optional<double> reproduction_closed(double t) const override {
    if (t <= 0.0) return 0.0;
    return static_cast<double>(k_) * boost::math::ibetac(a_, b_, std::exp(-t));
  }

 private:
  std::size_t k_;
  double a_, b_;
};

}  // namespace

LawPtr uniform_binary() { return std::make_shared<UniformBinary>(); }
LawPtr deterministic_binary(double r) { return std::make_shared<DeterministicBinary>(r); }
LawPtr lossy_binary() { return std::make_shared<LossyBinary>(); }
LawPtr dirichlet_k(std::size_t k, double a) { return std::make_shared<DirichletK>(k, a); }

LawPtr make_law(const std::string& name, const std::map<std::string, double>& params) {
  const auto param = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
      (void)value;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
        throw UnknownLawError(name + ": unknown parameter '" + key + "'");
    }
  };
  if (name == "uniform_binary") {
    reject_unknown({});
    return uniform_binary();
  }
  if (name == "deterministic_binary") {
    reject_unknown({"r"});
    return deterministic_binary(param("r", 0.5));
  }
  if (name == "lossy_binary") {
    reject_unknown({});
    return lossy_binary();
  }
  if (name == "dirichlet_k") {
    reject_unknown({"k", "a"});
    const double k = param("k", 3.0);
    if (k < 2.0 || k != std::floor(k)) throw DomainError("dirichlet_k: k must be an integer >= 2");
    return dirichlet_k(static_cast<std::size_t>(k), param("a", 1.0));
  }
  throw UnknownLawError("unknown dislocation law '" + name + "'");
}

void ErosionParams::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("erosion coefficient must be finite and >= 0");
}

MomentEstimate monte_carlo_over_law(const DislocationLaw& law,
                                    const std::function<double(const MassPartition&)>& g,
                                    double rel_tol, std::size_t max_samples) {
  RngStream rng(0x5eedf00dULL, std::hash<std::string>{}(law.name()));
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  constexpr std::size_t kBatch = 1u << 14;
  while (n < max_samples) {
    for (std::size_t i = 0; i < kBatch; ++i) {
      const double v = g(law.sample(rng));
      ++n;
      const double delta = v - mean;
      mean += delta / static_cast<double>(n);
      m2 += delta * (v - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    if (se <= rel_tol * std::max(std::abs(mean), 1e-3)) break;
  }
  const double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  return {mean, se, false};
}

MomentEstimate sigma_moment(const DislocationLaw& law, double p) {
  if (!(p > law.underline_p()))
    throw DomainError("sigma_moment: p must exceed underline_p (moment diverges)");
  if (p == 1.0 && law.metadata().conservative) return {1.0, 0.0, true};
  if (auto closed = law.sigma_moment_closed(p, 0)) return {*closed, 0.0, true};
  return monte_carlo_over_law(law, [p](const MassPartition& s) {
    double total = 0.0;
    for (double l : s.log_sizes()) total += std::exp(p * l);
    return total;
  });
}

}  // namespace fragchain
