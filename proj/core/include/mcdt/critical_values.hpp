#pragma once

// Critical constants for the single-step, step-down and step-up procedures.
// Step-wise constants are solved by bisection on a Monte Carlo estimate that
// reuses one draw set for every bisection iterate, so the estimated
// probability is monotone in the candidate constant.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcdt/gaussian.hpp"
#include "mcdt/model.hpp"

namespace mcdt {

enum class Provenance { PerComparison, SingleStepFWE, StepDown, StepUp };

std::string_view to_string(Provenance p);
/// Throws DomainError for an unknown name.
Provenance parse_provenance(std::string_view name);

struct CriticalValues {
  std::vector<double> values;  ///< C_1 .. C_k
  Provenance provenance = Provenance::PerComparison;
  std::size_t k = 0;
  double rho = 0.0;
  double alpha = 0.05;
  double sigma2 = 1.0;
  std::optional<std::size_t> mc_reps;  ///< set only when Monte Carlo was used
  std::optional<std::uint64_t> seed;

  double operator[](std::size_t j) const { return values[j]; }
  std::size_t size() const noexcept { return values.size(); }

  bool strictly_increasing() const noexcept;

  /// Step-wise provenances must be strictly increasing; single-step and
  /// per-comparison records must be constant. Throws ConsistencyError.
  void validate() const;

  friend bool operator==(const CriticalValues&, const CriticalValues&) = default;
};

/// Wraps caller-supplied constants; throws ConsistencyError when they do not
/// fit the provenance (step-wise strictly increasing, single-step all equal).
CriticalValues make_critical_values(std::vector<double> values, Provenance provenance = Provenance::PerComparison);

enum class SolveMethod { Auto, MonteCarlo, ClosedForm };

struct SolverOptions {
  McConfig mc{};
  SolveMethod method = SolveMethod::Auto;  ///< Auto: closed form wherever one exists
  double tolerance = 1e-4;                 ///< bisection bracket width on C
};

/// sigma Phi^{-1}(1 - alpha).
double per_comparison_constant(double alpha, double sigma2 = 1.0);

CriticalValues per_comparison_constants(const ProblemSpec& spec);

/// C_j is the (1 - alpha) quantile of the maximum of j exchangeable
/// N(0, sigma2; rho) variables. rho = 0 has the closed form
/// sigma Phi^{-1}((1 - alpha)^{1/j}).
CriticalValues step_down_constants(const ProblemSpec& spec, const SolverOptions& opts = {});

/// Sequential solve: with C_1..C_{j-1} fixed, C_j makes
/// P{Z_(1) <= C_1, ..., Z_(j) <= C_j} = 1 - alpha for the order statistics of
/// j exchangeable variables. A non-increasing step raises ConsistencyError.
CriticalValues step_up_constants(const ProblemSpec& spec, const SolverOptions& opts = {});

/// Common constant with P{max of k <= C} = 1 - alpha, stored k times.
CriticalValues single_step_fwe_constant(const ProblemSpec& spec, const SolverOptions& opts = {});

/// Plain-text key=value record (one key per line).
std::string to_record(const CriticalValues& c);
/// Inverse of to_record. Throws DomainError on malformed input.
CriticalValues parse_record(std::string_view text);

}  // namespace mcdt
