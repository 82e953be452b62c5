#pragma once

// Verification suites. Each suite sweeps a default parameter set; any
// parameter given explicitly narrows the sweep to that value.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcdt/gaussian.hpp"
#include "mcdt/model.hpp"
#include "mcdt/procedures.hpp"
#include "mcdt_cli/report.hpp"

namespace mcdt::cli {

struct SuiteParams {
  std::optional<std::size_t> k;
  std::optional<double> rho;
  std::optional<double> b;
  std::optional<double> sigma2;
  std::optional<double> alpha;
  std::optional<ProcedureKind> procedure;
  std::optional<std::size_t> mc_reps;
  std::optional<double> epsilon;
  Variant variant = Variant::PointNull;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

const std::vector<std::string_view>& suite_names();
bool is_suite(std::string_view name);

/// Throws mcdt::Error subclasses on invalid parameters.
Report run_suite(std::string_view name, const SuiteParams& params);

}  // namespace mcdt::cli
