#include "mcdt/procedures.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "mcdt/error.hpp"

namespace mcdt {

namespace {

void check_dims(std::span<const double> z, const CriticalValues& c) {
  if (z.size() != c.values.size()) throw DimensionError("decision: observation length differs from constants");
}

void check_increasing(const CriticalValues& c) {
  if (!c.strictly_increasing()) throw DomainError("step-wise procedures need strictly increasing constants");
}

// Stable order: ties keep ascending original index.
std::vector<std::size_t> order_by(std::span<const double> z, bool descending) {
  std::vector<std::size_t> idx(z.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (descending)
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  else
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  return idx;
}

}  // namespace

ActionVector single_step_decide(std::span<const double> z, const CriticalValues& c) {
  check_dims(z, c);
  ActionVector a(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) a.set(i, z[i] > c[i]);
  return a;
}

ActionVector step_down_decide(std::span<const double> z, const CriticalValues& c) {
  check_dims(z, c);
  check_increasing(c);
  const std::size_t k = z.size();
  ActionVector a(k);
  const auto order = order_by(z, true);
  // order[p] holds Z_(k-p); it is compared with C_{k-p}.
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t idx = order[p];
    if (!(z[idx] > c[k - 1 - p])) break;
    a.set(idx);
  }
  return a;
}

ActionVector step_up_decide(std::span<const double> z, const CriticalValues& c) {
  check_dims(z, c);
  check_increasing(c);
  const std::size_t k = z.size();
  ActionVector a(k);
  const auto order = order_by(z, false);
  for (std::size_t j = 0; j < k; ++j) {
    if (z[order[j]] <= c[j]) continue;
    for (std::size_t rest = j; rest < k; ++rest) a.set(order[rest]);
    break;
  }
  return a;
}

std::string_view to_string(ProcedureKind p) {
  switch (p) {
    case ProcedureKind::SingleStep: return "single-step";
    case ProcedureKind::StepDown: return "step-down";
    case ProcedureKind::StepUp: return "step-up";
    case ProcedureKind::AcceptAll: return "accept-all";
    case ProcedureKind::RejectAll: return "reject-all";
  }
  return "unknown";
}

std::optional<ProcedureKind> parse_procedure(std::string_view name) {
  for (auto p : {ProcedureKind::SingleStep, ProcedureKind::StepDown, ProcedureKind::StepUp, ProcedureKind::AcceptAll,
                 ProcedureKind::RejectAll})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

DecisionMap make_procedure(ProcedureKind kind, CriticalValues c) {
  switch (kind) {
    case ProcedureKind::SingleStep:
      return [c = std::move(c)](std::span<const double> z) { return single_step_decide(z, c); };
    case ProcedureKind::StepDown:
      check_increasing(c);
      return [c = std::move(c)](std::span<const double> z) { return step_down_decide(z, c); };
    case ProcedureKind::StepUp:
      check_increasing(c);
      return [c = std::move(c)](std::span<const double> z) { return step_up_decide(z, c); };
    case ProcedureKind::AcceptAll:
      return [k = c.values.size()](std::span<const double> z) {
        if (z.size() != k) throw DimensionError("decision: observation length differs from constants");
        return ActionVector(k);
      };
    case ProcedureKind::RejectAll:
      return [k = c.values.size()](std::span<const double> z) {
        if (z.size() != k) throw DimensionError("decision: observation length differs from constants");
        ActionVector a(k);
        for (std::size_t i = 0; i < k; ++i) a.set(i);
        return a;
      };
  }
  throw DomainError("unknown procedure");
}

}  // namespace mcdt
