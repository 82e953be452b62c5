#pragma once

// Posterior cell probabilities for finitely supported priors, the Bayes rule
// for the additive loss, a product prior whose Bayes rule is the single-step
// procedure (independence case), and the prior sequence whose Bayes rules
// converge to the step-down procedure.
//
// All posterior arithmetic is done on log weights.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcdt/critical_values.hpp"
#include "mcdt/gaussian.hpp"
#include "mcdt/model.hpp"

namespace mcdt {

struct PriorAtom {
  ParameterPoint mu;
  double log_weight = 0.0;  ///< unnormalized
};

class DiscretePrior {
 public:
  /// Positive weights; throws DomainError for an empty prior, nonpositive
  /// weights or atoms outside the model for `variant`.
  static DiscretePrior from_weights(std::vector<ParameterPoint> atoms, std::vector<double> weights,
                                    Variant variant = Variant::PointNull);
  /// Unnormalized log weights; lets priors with astronomically large mass
  /// ratios be represented.
  static DiscretePrior from_log_weights(std::vector<PriorAtom> atoms, Variant variant = Variant::PointNull);

  std::size_t k() const noexcept { return k_; }
  Variant variant() const noexcept { return variant_; }
  /// Log weights normalized so that the weights sum to one.
  const std::vector<PriorAtom>& atoms() const noexcept { return atoms_; }

 private:
  DiscretePrior() = default;
  std::vector<PriorAtom> atoms_;
  std::size_t k_ = 0;
  Variant variant_ = Variant::PointNull;
};

struct PosteriorSummary {
  std::size_t k = 0;
  std::vector<double> cell;            ///< q(Omega_v | z), indexed by PartitionLabel::mask()
  std::vector<double> component_null;  ///< q(Omega^(i) | z) = sum over v with v_i = 0

  double at(const PartitionLabel& v) const { return cell.at(v.mask()); }
};

/// log(sum exp(x)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Cell posteriors from unnormalized log cell masses (index = label mask).
PosteriorSummary posterior_from_log_cells(std::span<const double> log_cells, std::size_t k);

PosteriorSummary posterior(const DiscretePrior& prior, std::span<const double> z, const IntraclassCov& cov);

/// a_i = 1 iff q(Omega^(i) | z) < b / (b + 1).
ActionVector bayes_action(const PosteriorSummary& post, double b);
ActionVector bayes_decide(const DiscretePrior& prior, std::span<const double> z, const IntraclassCov& cov, double b);

/// Posterior expected loss sum_v q(Omega_v | z) loss(a, v, b).
double posterior_expected_loss(const PosteriorSummary& post, const ActionVector& a, double b);

/// Product prior with atoms {0, m} per coordinate, masses (p_i, 1 - p_i),
/// p_i / (b (1 - p_i)) = exp((m C_i - m^2 / 2) / sigma2). Its Bayes rule is
/// the single-step rule with constants C. Requires rho = 0
/// (HypothesisError otherwise) and k <= 20.
DiscretePrior single_step_bayes_prior(const CriticalValues& c, double b, const ProblemSpec& spec,
                                      double alternative_mean = 1.0);

/// Index n (>= 2) of the step-down prior sequence together with its constants.
struct PriorSequenceSpec {
  std::size_t n = 2;
  CriticalValues c;
};

inline constexpr std::size_t kMaxPermutationDim = 8;

/// Log posterior numerators of the step-down prior sequence, indexed by
/// label mask. For v with s ones:
///   log[(1/s!) sum over orderings pi of the active indices of
///       exp(sum_{i=1..s} (z_{pi(i)} - C_{k+1-i}) n^{k+1-i})],
/// and 0 for v = 0. Requires k <= 8 (CapacityError) and unit covariance.
std::vector<double> stepdown_limit_log_numerators(std::span<const double> z, const PriorSequenceSpec& seq);

/// The prior atoms behind those numerators (for display and cross-checks):
/// mass (1/s!) exp(mu'mu/2 - sum_i C_{k+1-i} n^{k+1-i}) at each ordering of
/// (n^k, ..., n^{k+1-s}) over the active coordinates.
DiscretePrior stepdown_limit_prior(const PriorSequenceSpec& seq, Variant variant = Variant::PointNull);

struct ConvergenceRow {
  std::size_t n = 0;
  double winning_posterior = 0.0;  ///< posterior of the cell matching the action at this n
  ActionVector action;
  bool matches_step_down = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  ActionVector step_down_action;
  std::optional<ActionVector> limit_action;  ///< set when the action stabilized
  std::optional<std::size_t> stabilized_at;  ///< first n of the final constant run
  double min_margin = 0.0;                   ///< min_i |z_[i] - C_{k+1-i}| over the sorted z
  bool inconclusive = false;
  bool matches_step_down = false;
  bool eventually_monotone = false;  ///< step-down cell posterior nondecreasing over the final run
  std::string reason;
};

struct LimitOptions {
  std::vector<std::size_t> schedule;  ///< empty: 2, 3, ..., 40
  double b = 1.0;
  double boundary_margin = 0.1;  ///< min_margin at or below this is reported inconclusive
  std::size_t stable_run = 3;    ///< identical trailing actions needed to call convergence
};

std::vector<std::size_t> default_limit_schedule();

/// Applies the Bayes rule for each prior in the schedule and compares the
/// stabilized action with step_down_decide(z, C). Non-convergence and
/// near-boundary observations are reported as inconclusive, never thrown.
ConvergenceReport bayes_limit_action(std::span<const double> z, const ProblemSpec& spec, const CriticalValues& c,
                                     const LimitOptions& opts = {});

}  // namespace mcdt
