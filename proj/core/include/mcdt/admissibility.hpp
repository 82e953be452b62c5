#pragma once

// Numerical admissibility checks: section monotonicity in natural
// coordinates y = Sigma^{-1} z, the explicit negative-correlation boundary
// construction, and the local risk-derivative functional whose pointwise
// minimizer is the single-step rule.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcdt/critical_values.hpp"
#include "mcdt/gaussian.hpp"
#include "mcdt/model.hpp"
#include "mcdt/procedures.hpp"
#include "mcdt/risk.hpp"

namespace mcdt {

using YCoordinates = std::vector<double>;

YCoordinates to_y(std::span<const double> z, const IntraclassCov& cov);
std::vector<double> to_z(std::span<const double> y, const IntraclassCov& cov);

/// Rejection of H_i by the single-step rule written in y coordinates:
/// sigma2 (y_i + rho sum_{j != i} y_j) > C_i.
bool single_step_section_form(std::span<const double> y, const CriticalValues& c, const IntraclassCov& cov,
                              std::size_t i = 0);

/// Threshold t(z_rest) such that step-down rejects the remaining coordinate
/// iff it exceeds t (ties aside). With w the descending sort of z_rest and m
/// the length of the prefix with w_j > C_{k+1-j}, t = C_{k-m}.
double stepdown_section_threshold(std::span<const double> z_rest, const CriticalValues& c);

struct SectionViolation {
  std::size_t section = 0;
  YCoordinates y_before;  ///< rejected here
  YCoordinates y_after;   ///< accepted here, y_i one grid step higher
};

struct ScanOptions {
  std::size_t component = 0;
  std::size_t sections = 100;
  double lo = -5.0;
  double hi = 5.0;
  double step = 0.05;
  double tie_tolerance = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

struct ScanReport {
  std::vector<SectionViolation> violations;
  std::size_t sections = 0;
  std::size_t points = 0;
  std::size_t ties_skipped = 0;
  std::size_t sections_with_violation = 0;
};

/// Random sections (y_j, j != i) ~ U[lo, hi]; sweep y_i ascending and report
/// every loss of rejection between consecutive non-tie grid points. A point
/// is a tie when some |z_j - C_l| < tie_tolerance.
ScanReport section_monotonicity_scan(const DecisionMap& proc, const IntraclassCov& cov, const CriticalValues& c,
                                     const ScanOptions& opts = {});

struct LocalSearchOptions {
  std::size_t component = 0;
  std::size_t sections = 64;
  double jitter = 0.05;      ///< section offsets ~ U[-jitter, jitter] around the center
  double half_width = 0.5;   ///< y_i sweep half-width around the center
  double step = 0.005;
  double tie_tolerance = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

/// Section sweeps through points near `center_z`.
ScanReport local_section_search(const DecisionMap& proc, const IntraclassCov& cov, const CriticalValues& c,
                                std::span<const double> center_z, const LocalSearchOptions& opts = {});

/// ((C_1 + C_2)/2, C_1, ..., C_1): the step-up analogue of the boundary point.
std::vector<double> stepup_counterexample_center(const CriticalValues& c);

struct CounterexampleReport {
  std::vector<double> z_star;
  std::vector<double> z_star_star;
  YCoordinates y_star;
  YCoordinates y_star_star;
  std::vector<double> y_difference;  ///< y* - y**
  std::vector<double> r_col;         ///< first column of Sigma
  double epsilon = 0.0;
  bool accepts_at_star = false;
  bool rejects_at_star_star = false;
  bool y_difference_exact = false;  ///< y* - y** = (epsilon, 0, ..., 0) to 1e-12

  bool verified() const noexcept { return accepts_at_star && rejects_at_star_star && y_difference_exact; }
};

/// z* = ((C_{k-1} + C_k)/2, C_k, ..., C_k), z** = z* - epsilon r_col; checks
/// that step-down accepts H_1 at z* and rejects it at z**. Requires k >= 2,
/// rho < 0 (DomainError) and 0 < epsilon < (C_k - C_{k-1})/2
/// (ConstructionError).
CounterexampleReport counterexample_negative_rho(const ProblemSpec& spec, const CriticalValues& c, double epsilon);

/// gamma = (1 + b rho) / (b (1 - rho)).
double local_gamma(double b, double rho);

struct LocalWeightScheme {
  double gamma = 0.0;
  double delta = 0.0;
  std::size_t k = 0;
  std::vector<double> weights;  ///< indexed by label mask, 2^k entries

  double weight(const PartitionLabel& v) const { return weights.at(v.mask()); }
  std::vector<PartitionLabel> unit_labels() const;
};

/// lambda_0 = 1, lambda_{e_i} = exp(-C' Sigma^{-1} e_i delta),
/// lambda_1 = gamma exp(-C' Sigma^{-1} 1 delta), zero elsewhere. For k = 1
/// the unit label and the all-ones label coincide and their weights add.
LocalWeightScheme lambda_weights(double delta, const CriticalValues& c, const IntraclassCov& cov, double b);

/// Integrand of the local derivative at delta = 0 for action a at z
/// (excluding the density factor f(z | 0)).
double local_integrand(std::span<const double> z, const ActionVector& a, const CriticalValues& c,
                       const IntraclassCov& cov, double b);

/// Minimizer of local_integrand over all 2^k actions; ties go to the lowest mask.
ActionVector integrand_argmin(std::span<const double> z, const CriticalValues& c, const IntraclassCov& cov, double b);

struct LocalDerivative {
  RiskEstimate analytic;
  RiskEstimate finite_diff;

  double combined_se() const;
  /// |analytic - finite_diff| <= max(se_mult * combined SE, rel_tol |analytic|).
  bool agrees(double se_mult = 3.0, double rel_tol = 1e-3) const;
};

/// Monte Carlo estimates of the delta-derivative at 0 of
/// sum_v lambda_v(delta) R_v(proc, delta v): the analytic expectation and a
/// central difference with step h on common draws. Requires 1 + b rho != 0.
LocalDerivative local_derivative_at_zero(const DecisionMap& proc, const IntraclassCov& cov, double b,
                                         const CriticalValues& c, const McConfig& mc, double h = 1e-3);

/// Analytic estimate only, on caller-supplied draws from f(z | 0).
RiskEstimate local_derivative_analytic(const DecisionMap& proc, const DrawSet& draws, const IntraclassCov& cov,
                                       double b, const CriticalValues& c);

/// proc(-z) on the box [lo, hi] and its reflection, proc(z) elsewhere. The
/// box must not meet its reflection (ConstructionError). Under f(z | 0) the
/// rejection rate of every coordinate is unchanged.
DecisionMap reflection_swap(DecisionMap proc, std::vector<double> lo, std::vector<double> hi);

}  // namespace mcdt
