#include "mcdt/critical_values.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "mcdt/error.hpp"
#include "mcdt/format.hpp"

namespace mcdt {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::PerComparison: return "per-comparison";
    case Provenance::SingleStepFWE: return "single-step-fwe";
    case Provenance::StepDown: return "step-down";
    case Provenance::StepUp: return "step-up";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  for (auto p : {Provenance::PerComparison, Provenance::SingleStepFWE, Provenance::StepDown,
                 Provenance::StepUp})
    if (to_string(p) == name) return p;
  throw DomainError("unknown provenance '" + std::string(name) + "'");
}

bool CriticalValues::strictly_increasing() const noexcept {
  for (std::size_t j = 1; j < values.size(); ++j)
    if (!(values[j] > values[j - 1])) return false;
  return true;
}

void CriticalValues::validate() const {
  if (values.size() != k) throw ConsistencyError("critical values: length differs from k");
  for (double v : values)
    if (!std::isfinite(v)) throw ConsistencyError("critical values: non-finite constant");
  switch (provenance) {
    case Provenance::StepDown:
    case Provenance::StepUp:
      if (!strictly_increasing())
        throw ConsistencyError("critical values: step-wise constants not strictly increasing");
      break;
    case Provenance::SingleStepFWE:
    case Provenance::PerComparison:
      if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) != values.end())
        throw ConsistencyError("critical values: single-step constants must be equal");
      break;
  }
}

CriticalValues make_critical_values(std::vector<double> values, Provenance provenance) {
  CriticalValues c;
  c.k = values.size();
  c.values = std::move(values);
  c.provenance = provenance;
  c.validate();
  return c;
}

double per_comparison_constant(double alpha, double sigma2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  return std::sqrt(sigma2) * std_normal_quantile(1.0 - alpha);
}

namespace {

CriticalValues base_record(const ProblemSpec& spec, Provenance provenance) {
  CriticalValues c;
  c.k = spec.k;
  c.rho = spec.rho;
  c.alpha = spec.alpha;
  c.sigma2 = spec.sigma2;
  c.provenance = provenance;
  c.values.assign(spec.k, 0.0);
  return c;
}

// Smallest c (to within tol) with cdf(c) >= target, given cdf(lo) < target <= cdf(hi).
double bisect(const std::function<double(double)>& cdf, double target, double lo, double hi, double tol) {
  if (!(cdf(lo) < target)) throw SolverError("bisection: lower end does not bracket the target");
  if (!(cdf(hi) >= target)) throw SolverError("bisection: upper end does not bracket the target");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= target)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Fraction of entries <= c, counted over entries whose `keep` flag is set
// (all entries when keep is empty); denominator is always the full count.
double empirical_cdf(const std::vector<double>& values, const std::vector<std::uint8_t>& keep, double c) {
  std::size_t hits = 0;
  if (keep.empty()) {
    for (double v : values) hits += v <= c;
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) hits += keep[i] && values[i] <= c;
  }
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

DrawSet null_draws(const ProblemSpec& spec, const McConfig& mc) {
  if (mc.reps < 1000) throw DomainError("critical value solver needs at least 1000 replications");
  const IntraclassCov cov = IntraclassCov::from(spec);
  const std::vector<double> zero(spec.k, 0.0);
  return sample_mvn(cov, zero, mc.reps, mc.seed, mc.threads);
}

// Running maximum of the first j coordinates of every draw, j = 1..k.
std::vector<std::vector<double>> prefix_maxima(const DrawSet& draws) {
  std::vector<std::vector<double>> out(draws.k(), std::vector<double>(draws.n()));
  for (std::size_t r = 0; r < draws.n(); ++r) {
    const auto row = draws.row(r);
    double m = row[0];
    for (std::size_t j = 0; j < draws.k(); ++j) {
      m = std::max(m, row[j]);
      out[j][r] = m;
    }
  }
  return out;
}

void record_mc(CriticalValues& c, const McConfig& mc) {
  c.mc_reps = mc.reps;
  c.seed = mc.seed;
}

}  // namespace

CriticalValues per_comparison_constants(const ProblemSpec& spec) {
  spec.validate();
  CriticalValues c = base_record(spec, Provenance::PerComparison);
  std::fill(c.values.begin(), c.values.end(), per_comparison_constant(spec.alpha, spec.sigma2));
  return c;
}

CriticalValues step_down_constants(const ProblemSpec& spec, const SolverOptions& opts) {
  spec.validate();
  CriticalValues c = base_record(spec, Provenance::StepDown);
  const double sigma = std::sqrt(spec.sigma2);
  const double target = 1.0 - spec.alpha;

  const bool closed = opts.method == SolveMethod::ClosedForm ||
                      (opts.method == SolveMethod::Auto && (spec.rho == 0.0 || spec.k == 1));
  if (closed) {
    if (spec.rho != 0.0 && spec.k > 1) throw DomainError("step-down closed form requires rho = 0");
    for (std::size_t j = 1; j <= spec.k; ++j)
      c.values[j - 1] = sigma * std_normal_quantile(std::pow(target, 1.0 / static_cast<double>(j)));
    c.validate();
    return c;
  }

  const DrawSet draws = null_draws(spec, opts.mc);
  const auto maxima = prefix_maxima(draws);
  const std::vector<std::uint8_t> all;
  for (std::size_t j = 1; j <= spec.k; ++j) {
    if (j == 1 && opts.method == SolveMethod::Auto) {
      c.values[0] = per_comparison_constant(spec.alpha, spec.sigma2);
      continue;
    }
    const double lo = sigma * std_normal_quantile(target) - 1.0;
    const double hi = sigma * std_normal_quantile(1.0 - spec.alpha / static_cast<double>(j)) + 1.0;
    const auto& m = maxima[j - 1];
    c.values[j - 1] = bisect([&](double x) { return empirical_cdf(m, all, x); }, target, lo, hi, opts.tolerance);
  }
  record_mc(c, opts.mc);
  c.validate();
  return c;
}

CriticalValues step_up_constants(const ProblemSpec& spec, const SolverOptions& opts) {
  spec.validate();
  if (opts.method == SolveMethod::ClosedForm && spec.k > 1)
    throw DomainError("step-up constants have no closed form for k > 1");
  CriticalValues c = base_record(spec, Provenance::StepUp);
  const double sigma = std::sqrt(spec.sigma2);
  const double target = 1.0 - spec.alpha;

  if (spec.k == 1 && opts.method != SolveMethod::MonteCarlo) {
    c.values[0] = per_comparison_constant(spec.alpha, spec.sigma2);
    return c;
  }

  const DrawSet draws = null_draws(spec, opts.mc);
  const std::size_t n = draws.n();
  // Sorted prefix of the first j coordinates, kept per draw and extended one
  // coordinate at a time; ok[r] tracks whether s_i <= C_i for all i < j.
  const std::size_t k = spec.k;
  std::vector<double> sorted(n * k);
  std::vector<std::uint8_t> ok(n, 1);
  std::vector<double> top(n);

  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t r = 0; r < n; ++r) {
      double* s = sorted.data() + r * k;
      const double x = draws.row(r)[j - 1];
      double* at = std::upper_bound(s, s + (j - 1), x);
      std::copy_backward(at, s + (j - 1), s + j);
      *at = x;
      bool pass = true;
      for (std::size_t i = 0; i + 1 < j && pass; ++i) pass = s[i] <= c.values[i];
      ok[r] = pass;
      top[r] = s[j - 1];
    }
    if (j == 1 && opts.method == SolveMethod::Auto) {
      c.values[0] = per_comparison_constant(spec.alpha, spec.sigma2);
      continue;
    }
    auto cdf = [&](double x) { return empirical_cdf(top, ok, x); };
    double lo;
    if (j == 1) {
      lo = sigma * std_normal_quantile(target) - 1.0;
    } else {
      lo = c.values[j - 2];
      if (cdf(lo) >= target) {
        std::ostringstream os;
        os << "step-up constants: C_" << j << " would not exceed C_" << j - 1 << "=" << lo;
        throw ConsistencyError(os.str());
      }
    }
    double hi = lo + sigma;
    while (cdf(hi) < target) {
      hi = lo + 2.0 * (hi - lo);
      if (hi - lo > 64.0 * sigma) throw SolverError("step-up constants: cannot bracket C_" + std::to_string(j));
    }
    c.values[j - 1] = bisect(cdf, target, lo, hi, opts.tolerance);
  }
  record_mc(c, opts.mc);
  c.validate();
  return c;
}

CriticalValues single_step_fwe_constant(const ProblemSpec& spec, const SolverOptions& opts) {
  spec.validate();
  CriticalValues c = base_record(spec, Provenance::SingleStepFWE);
  const double target = 1.0 - spec.alpha;
  const double sigma = std::sqrt(spec.sigma2);
  const bool closed = opts.method == SolveMethod::ClosedForm ||
                      (opts.method == SolveMethod::Auto && (spec.rho == 0.0 || spec.k == 1));
  double value;
  if (closed) {
    if (spec.rho != 0.0 && spec.k > 1) throw DomainError("single-step closed form requires rho = 0");
    value = sigma * std_normal_quantile(std::pow(target, 1.0 / static_cast<double>(spec.k)));
  } else {
    const DrawSet draws = null_draws(spec, opts.mc);
    std::vector<double> maxima(draws.n());
    for (std::size_t r = 0; r < draws.n(); ++r) {
      const auto row = draws.row(r);
      maxima[r] = *std::max_element(row.begin(), row.end());
    }
    const double lo = sigma * std_normal_quantile(target) - 1.0;
    const double hi = sigma * std_normal_quantile(1.0 - spec.alpha / static_cast<double>(spec.k)) + 1.0;
    const std::vector<std::uint8_t> all;
    value = bisect([&](double x) { return empirical_cdf(maxima, all, x); }, target, lo, hi, opts.tolerance);
    record_mc(c, opts.mc);
  }
  std::fill(c.values.begin(), c.values.end(), value);
  return c;
}

std::string to_record(const CriticalValues& c) {
  std::ostringstream os;
  os << "k=" << c.k << '\n';
  os << "rho=" << format_double(c.rho) << '\n';
  os << "sigma2=" << format_double(c.sigma2) << '\n';
  os << "alpha=" << format_double(c.alpha) << '\n';
  os << "provenance=" << to_string(c.provenance) << '\n';
  os << "values=";
  for (std::size_t j = 0; j < c.values.size(); ++j) os << (j ? "," : "") << format_double(c.values[j]);
  os << '\n';
  os << "mc_reps=" << (c.mc_reps ? std::to_string(*c.mc_reps) : "none") << '\n';
  os << "seed=" << (c.seed ? std::to_string(*c.seed) : "none") << '\n';
  return os.str();
}

namespace {

template <class Int>
Int parse_integer(std::string_view key, std::string_view s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError("critical value record: bad integer for '" + std::string(key) + "'");
  return v;
}

double parse_real(std::string_view key, std::string_view s) {
  const auto v = parse_double(s);
  if (!v) throw DomainError("critical value record: bad number for '" + std::string(key) + "'");
  return *v;
}

}  // namespace

CriticalValues parse_record(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DomainError("critical value record: line without '='");
    fields[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  auto need = [&](std::string_view key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw DomainError("critical value record: missing '" + std::string(key) + "'");
    return it->second;
  };

  CriticalValues c;
  c.k = parse_integer<std::size_t>("k", need("k"));
  c.rho = parse_real("rho", need("rho"));
  c.alpha = parse_real("alpha", need("alpha"));
  if (auto it = fields.find("sigma2"); it != fields.end()) c.sigma2 = parse_real("sigma2", it->second);
  c.provenance = parse_provenance(need("provenance"));
  std::string_view vals = need("values");
  while (!vals.empty()) {
    const auto comma = vals.find(',');
    c.values.push_back(parse_real("values", vals.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    vals.remove_prefix(comma + 1);
  }
  if (auto it = fields.find("mc_reps"); it != fields.end() && it->second != "none")
    c.mc_reps = parse_integer<std::size_t>("mc_reps", it->second);
  if (auto it = fields.find("seed"); it != fields.end() && it->second != "none")
    c.seed = parse_integer<std::uint64_t>("seed", it->second);
  if (c.values.size() != c.k) throw DomainError("critical value record: values length differs from k");
  return c;
}

}  // namespace mcdt
