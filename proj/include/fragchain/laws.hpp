#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fragchain/core.hpp"

namespace fragchain {

struct UnknownLawError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LawMetadata {
  bool conservative = false;
  /// Ratios supported on powers of a single r; several limit theorems
  /// require this to be false.
  bool geometric = false;
  /// Empty when the number of children is unbounded.
  std::optional<std::size_t> max_children;
};

/// Law ν of the ranked child-to-parent size ratios at a dislocation.
///
/// Subclasses supply a raw sampler and whatever closed forms they know.
/// Anything without a closed form falls back to Monte Carlo in the
/// analytic layer.
class DislocationLaw {
 public:
  virtual ~DislocationLaw() = default;

  virtual std::string name() const = 0;
  virtual std::map<std::string, double> params() const { return {}; }
  virtual LawMetadata metadata() const = 0;
  /// inf{p > 0 : E Σ s_i^p < ∞}.
  virtual double underline_p() const { return 0.0; }

  /// One raw draw of child ratios in any order; zeros allowed.
  virtual void draw_ratios(RngStream& rng, std::vector<double>& out) const = 0;

  /// d^k/dp^k E[Σ s_i^p] for k = 0, 1, 2.
  virtual std::optional<double> sigma_moment_closed(double /*p*/, int /*derivative*/ = 0) const {
    return std::nullopt;
  }
  /// E[Σ 1{s_i < x} s_i^p].
  virtual std::optional<double> partial_moment_closed(double /*p*/, double /*x*/) const {
    return std::nullopt;
  }
  /// E[Σ 1{s_i ≥ e^{-t}}].
  virtual std::optional<double> reproduction_closed(double /*t*/) const { return std::nullopt; }

  /// Ranked log-ratios of one ν-draw, written into `log_ratios`. Draws that
  /// put all mass on a single unit piece are rejected and redrawn.
  void sample_log_ratios(RngStream& rng, std::vector<double>& log_ratios) const;
  MassPartition sample(RngStream& rng) const;
};

using LawPtr = std::shared_ptr<const DislocationLaw>;

/// Split at V uniform on (0,1): pieces (max(V,1-V), min(V,1-V)).
LawPtr uniform_binary();
/// Pieces (r, 1-r) on every draw.
LawPtr deterministic_binary(double r);
/// Two equal pieces (U/2, U/2); mass 1-U is lost.
LawPtr lossy_binary();
/// k pieces with symmetric Dirichlet(a, ..., a) weights.
LawPtr dirichlet_k(std::size_t k, double a = 1.0);

/// Resolves {"name": ..., "params": {...}}; throws UnknownLawError.
LawPtr make_law(const std::string& name, const std::map<std::string, double>& params = {});

struct ErosionParams {
  double c = 0.0;
  void validate() const;
};

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool closed_form = false;
};

/// E[Σ s_i^p]. Closed form when the law has one; otherwise an adaptive
/// Monte Carlo estimate on a fixed internal stream.
MomentEstimate sigma_moment(const DislocationLaw& law, double p);

/// Adaptive Monte Carlo estimate of E[g(s)] over ν, stopping once the
/// standard error is below `rel_tol` relative to max(|mean|, 1e-3).
MomentEstimate monte_carlo_over_law(const DislocationLaw& law,
                                    const std::function<double(const MassPartition&)>& g,
                                    double rel_tol = 1e-4, std::size_t max_samples = 1u << 21);

}  // namespace fragchain
