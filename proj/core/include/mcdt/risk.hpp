#pragma once

// Monte Carlo loss/risk calculus: scalar and per-component risk, risks at the
// origin extended from every parameter cell, and the cell-aggregation
// identities. Estimators that share a seed share their draws, so identities
// that are algebraic in psi hold to rounding error.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mcdt/gaussian.hpp"
#include "mcdt/model.hpp"
#include "mcdt/procedures.hpp"

namespace mcdt {

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample sd / sqrt(n_reps)
  std::size_t n_reps = 0;
  std::uint64_t seed = 0;
};

/// Possibly randomized test functions psi(z) in [0, 1]^k.
using TestFunction = std::function<std::vector<double>(std::span<const double>)>;
/// delta(. | z): a mass function on the action set for each observation.
using RandomizedRule = std::function<DecisionRuleMass(std::span<const double>)>;

/// Counts of each action taken by a nonrandomized procedure over a draw set.
/// Any loss-linear statistic of the procedure on those draws is a weighted
/// sum over this histogram.
class ActionHistogram {
 public:
  /// k <= 20.
  ActionHistogram(const DecisionMap& proc, const DrawSet& draws);

  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  std::span<const std::size_t> counts() const noexcept { return counts_; }

  /// Mean and standard error of loss(a(z), v, b) over the draws.
  RiskEstimate risk_for(const PartitionLabel& v, double b, std::uint64_t seed) const;
  /// Mean and standard error of psi_i(z).
  RiskEstimate rejection_rate(std::size_t i, std::uint64_t seed) const;
  /// Mean of sum_i psi_i(z).
  double expected_rejections() const;

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

RiskEstimate risk_scalar(const DecisionMap& proc, std::span<const double> mu, const ProblemSpec& spec,
                         const McConfig& mc);
RiskEstimate risk_scalar(const TestFunction& psi, std::span<const double> mu, const ProblemSpec& spec,
                         const McConfig& mc);

/// Component i estimates E psi_i when v_i = 0 and b (1 - E psi_i) when v_i = 1.
std::vector<RiskEstimate> risk_vector(const DecisionMap& proc, std::span<const double> mu, const ProblemSpec& spec,
                                      const McConfig& mc);

/// R_v(psi, 0) for every label v, all from one draw set at mu = 0.
struct OriginRiskTable {
  std::size_t k = 0;
  double b = 1.0;
  std::vector<RiskEstimate> by_label;  ///< indexed by PartitionLabel::mask()
  double expected_rejections = 0.0;    ///< E_0 sum_i psi_i on the same draws

  const RiskEstimate& at(const PartitionLabel& v) const { return by_label.at(v.mask()); }
};

OriginRiskTable origin_risk_table(const DecisionMap& proc, const ProblemSpec& spec, const McConfig& mc);

struct AggregateIdentity {
  double lhs = 0.0;  ///< sum over labels with r ones of R_v(psi, 0)
  double rhs = 0.0;  ///< b k C(k-1, r-1) + [C(k-1, r) - b C(k-1, k-r)] E_0 sum psi_i
};

/// Throws DomainError unless 1 <= r <= k-1.
AggregateIdentity gamma_r_aggregate(const OriginRiskTable& table, std::size_t r);
AggregateIdentity gamma_r_aggregate(const DecisionMap& proc, std::size_t r, const ProblemSpec& spec,
                                    const McConfig& mc);

/// E_mu sum_a L(a, mu) delta(a | z), evaluated action by action.
RiskEstimate rule_mass_risk(const RandomizedRule& delta, std::span<const double> mu, const ProblemSpec& spec,
                            const McConfig& mc);

/// Binomial coefficient as a double (0 outside 0 <= r <= n).
double binomial(std::size_t n, std::size_t r);

}  // namespace mcdt
