#pragma once

// Decision maps z -> a for the single-step, step-down and step-up procedures.

#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "mcdt/critical_values.hpp"
#include "mcdt/model.hpp"

namespace mcdt {

/// Reject H_i iff z_i > C_i; equality accepts.
ActionVector single_step_decide(std::span<const double> z, const CriticalValues& c);

/// Walk the order statistics from the largest down: reject H_(j) while
/// Z_(j) > C_j, accept everything from the first failure on. Requires
/// strictly increasing constants (DomainError otherwise).
ActionVector step_down_decide(std::span<const double> z, const CriticalValues& c);

/// Walk the order statistics from the smallest up: accept H_(j) while
/// Z_(j) <= C_j, reject everything from the first exceedance on.
ActionVector step_up_decide(std::span<const double> z, const CriticalValues& c);

enum class ProcedureKind { SingleStep, StepDown, StepUp, AcceptAll, RejectAll };

std::string_view to_string(ProcedureKind p);
std::optional<ProcedureKind> parse_procedure(std::string_view name);

using DecisionMap = std::function<ActionVector(std::span<const double>)>;

/// Binds constants to a procedure. AcceptAll / RejectAll ignore the
/// constants except for their length.
DecisionMap make_procedure(ProcedureKind kind, CriticalValues c);

}  // namespace mcdt
