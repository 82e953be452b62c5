#include "mcdt/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "mcdt/error.hpp"

namespace mcdt {

namespace {

void check_dim(std::size_t got, std::size_t k, const char* what) {
  if (got != k) throw DimensionError(what);
}

bool is_tie(std::span<const double> z, const CriticalValues& c, double tol) {
  for (double zj : z)
    for (double cl : c.values)
      if (std::abs(zj - cl) < tol) return true;
  return false;
}

// Sweeps y_i over [lo, hi] on the given section and appends violations.
void sweep_section(const DecisionMap& proc, const IntraclassCov& cov, const CriticalValues& c, YCoordinates y,
                   std::size_t i, double lo, double hi, double step, double tol, std::size_t section,
                   ScanReport& rep) {
  const auto npts = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  bool have_prev = false;
  bool prev = false;
  YCoordinates y_prev;
  bool found = false;
  for (std::size_t t = 0; t < npts; ++t) {
    y[i] = lo + static_cast<double>(t) * step;
    const auto z = to_z(y, cov);
    ++rep.points;
    if (is_tie(z, c, tol)) {
      ++rep.ties_skipped;
      continue;
    }
    const bool rej = proc(z)[i];
    if (have_prev && prev && !rej) {
      rep.violations.push_back({section, y_prev, y});
      found = true;
    }
    have_prev = true;
    prev = rej;
    y_prev = y;
  }
  if (found) ++rep.sections_with_violation;
  ++rep.sections;
}

void check_scan(std::size_t component, std::size_t k, double step) {
  if (component >= k) throw DimensionError("scan: component out of range");
  if (!(step > 0.0)) throw DomainError("scan: grid step must be positive");
}

}  // namespace

YCoordinates to_y(std::span<const double> z, const IntraclassCov& cov) {
  check_dim(z.size(), cov.k(), "to_y: dimension mismatch");
  YCoordinates y(z.size());
  cov.apply_precision(z, y);
  return y;
}

std::vector<double> to_z(std::span<const double> y, const IntraclassCov& cov) {
  check_dim(y.size(), cov.k(), "to_z: dimension mismatch");
  std::vector<double> z(y.size());
  cov.apply(y, z);
  return z;
}

bool single_step_section_form(std::span<const double> y, const CriticalValues& c, const IntraclassCov& cov,
                              std::size_t i) {
  const std::size_t k = cov.k();
  check_dim(y.size(), k, "section form: dimension mismatch");
  check_dim(c.size(), k, "section form: constants length differs from k");
  if (i >= k) throw DimensionError("section form: component out of range");
  double rest = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    if (j != i) rest += y[j];
  return cov.sigma2() * (y[i] + cov.rho() * rest) > c[i];
}

double stepdown_section_threshold(std::span<const double> z_rest, const CriticalValues& c) {
  const std::size_t k = z_rest.size() + 1;
  check_dim(c.size(), k, "section threshold: constants length differs from k");
  if (!c.strictly_increasing()) throw DomainError("section threshold: constants must be strictly increasing");
  std::vector<double> w(z_rest.begin(), z_rest.end());
  std::sort(w.begin(), w.end(), std::greater<>());
  std::size_t m = 0;
  while (m < w.size() && w[m] > c[k - 1 - m]) ++m;
  return c[k - 1 - m];
}

ScanReport section_monotonicity_scan(const DecisionMap& proc, const IntraclassCov& cov, const CriticalValues& c,
                                     const ScanOptions& opts) {
  const std::size_t k = cov.k();
  check_scan(opts.component, k, opts.step);
  check_dim(c.size(), k, "scan: constants length differs from k");
  if (!(opts.hi > opts.lo)) throw DomainError("scan: empty grid");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(opts.lo, opts.hi);
  ScanReport rep;
  for (std::size_t s = 0; s < opts.sections; ++s) {
    YCoordinates y(k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      if (j != opts.component) y[j] = unif(rng);
    sweep_section(proc, cov, c, std::move(y), opts.component, opts.lo, opts.hi, opts.step, opts.tie_tolerance, s,
                  rep);
  }
  return rep;
}

ScanReport local_section_search(const DecisionMap& proc, const IntraclassCov& cov, const CriticalValues& c,
                                std::span<const double> center_z, const LocalSearchOptions& opts) {
  const std::size_t k = cov.k();
  check_scan(opts.component, k, opts.step);
  check_dim(center_z.size(), k, "local search: center dimension mismatch");
  check_dim(c.size(), k, "local search: constants length differs from k");

  const auto center = to_y(center_z, cov);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-opts.jitter, opts.jitter);
  ScanReport rep;
  for (std::size_t s = 0; s < opts.sections; ++s) {
    YCoordinates y = center;
    for (std::size_t j = 0; j < k; ++j)
      if (j != opts.component) y[j] += unif(rng);
    const double ci = center[opts.component];
    sweep_section(proc, cov, c, std::move(y), opts.component, ci - opts.half_width, ci + opts.half_width, opts.step,
                  opts.tie_tolerance, s, rep);
  }
  return rep;
}

std::vector<double> stepup_counterexample_center(const CriticalValues& c) {
  if (c.size() < 2) throw DimensionError("step-up center: needs k >= 2");
  std::vector<double> z(c.size(), c[0]);
  z[0] = 0.5 * (c[0] + c[1]);
  return z;
}

CounterexampleReport counterexample_negative_rho(const ProblemSpec& spec, const CriticalValues& c, double epsilon) {
  spec.validate();
  const std::size_t k = spec.k;
  if (k < 2) throw DimensionError("counterexample: needs k >= 2");
  if (!(spec.rho < 0.0)) throw DomainError("counterexample: construction requires rho < 0");
  check_dim(c.size(), k, "counterexample: constants length differs from k");
  if (!c.strictly_increasing()) throw DomainError("counterexample: constants must be strictly increasing");
  const double ck = c[k - 1];
  const double ck1 = c[k - 2];
  const double mid = 0.5 * (ck1 + ck);
  const IntraclassCov cov = IntraclassCov::from(spec);
  if (!(epsilon > 0.0)) throw ConstructionError("counterexample: epsilon must be positive");
  if (!(mid - epsilon * spec.sigma2 > ck1))
    throw ConstructionError("counterexample: epsilon too large, first coordinate of z** falls below C_{k-1}");

  CounterexampleReport rep;
  rep.epsilon = epsilon;
  rep.z_star.assign(k, ck);
  rep.z_star[0] = mid;
  rep.r_col.assign(k, spec.sigma2 * spec.rho);
  rep.r_col[0] = spec.sigma2;
  rep.z_star_star.resize(k);
  for (std::size_t j = 0; j < k; ++j) rep.z_star_star[j] = rep.z_star[j] - epsilon * rep.r_col[j];

  rep.y_star = to_y(rep.z_star, cov);
  rep.y_star_star = to_y(rep.z_star_star, cov);
  rep.y_difference.resize(k);
  rep.y_difference_exact = true;
  for (std::size_t j = 0; j < k; ++j) {
    rep.y_difference[j] = rep.y_star[j] - rep.y_star_star[j];
    const double want = j == 0 ? epsilon : 0.0;
    if (std::abs(rep.y_difference[j] - want) > 1e-12) rep.y_difference_exact = false;
  }
  rep.accepts_at_star = !step_down_decide(rep.z_star, c)[0];
  rep.rejects_at_star_star = step_down_decide(rep.z_star_star, c)[0];
  return rep;
}

double local_gamma(double b, double rho) {
  if (!(b > 0.0)) throw DomainError("gamma: b must be positive");
  if (!(rho < 1.0)) throw SingularityError("gamma: rho must be below 1");
  return (1.0 + b * rho) / (b * (1.0 - rho));
}

std::vector<PartitionLabel> LocalWeightScheme::unit_labels() const {
  std::vector<PartitionLabel> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(PartitionLabel::from_mask(std::uint64_t{1} << i, k));
  return out;
}

LocalWeightScheme lambda_weights(double delta, const CriticalValues& c, const IntraclassCov& cov, double b) {
  const std::size_t k = cov.k();
  check_dim(c.size(), k, "lambda weights: constants length differs from k");
  if (k > kMaxEnumerationDim) throw CapacityError("lambda weights: too many coordinates");
  LocalWeightScheme w;
  w.k = k;
  w.delta = delta;
  w.gamma = local_gamma(b, cov.rho());
  w.weights.assign(std::size_t{1} << k, 0.0);
  w.weights[0] = 1.0;

  std::vector<double> prec_c(k);
  cov.apply_precision(c.values, prec_c);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    w.weights[std::size_t{1} << i] += std::exp(-prec_c[i] * delta);
    total += prec_c[i];
  }
  w.weights[(std::size_t{1} << k) - 1] += w.gamma * std::exp(-total * delta);
  return w;
}

double local_integrand(std::span<const double> z, const ActionVector& a, const CriticalValues& c,
                       const IntraclassCov& cov, double b) {
  const std::size_t k = cov.k();
  check_dim(z.size(), k, "integrand: dimension mismatch");
  check_dim(a.size(), k, "integrand: action length differs from k");
  check_dim(c.size(), k, "integrand: constants length differs from k");
  const double g = cov.G();
  const double gamma = local_gamma(b, cov.rho());
  const double kd = static_cast<double>(k);

  double sum_diff = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum_diff += z[j] - c[j];
  const double rejections = static_cast<double>(a.count());

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ai = a[i] ? 1.0 : 0.0;
    const double bracket = rejections + b - (1.0 + b) * ai;
    total += bracket * ((z[i] - c[i]) - g * sum_diff);
  }
  total += gamma * b * (kd - rejections) * (1.0 - g * kd) * sum_diff;
  return total / (cov.sigma2() * (1.0 - cov.rho()));
}

ActionVector integrand_argmin(std::span<const double> z, const CriticalValues& c, const IntraclassCov& cov, double b) {
  const std::size_t k = cov.k();
  if (k > kMaxEnumerationDim) throw CapacityError("integrand argmin: too many coordinates");
  ActionVector best;
  double best_val = std::numeric_limits<double>::infinity();
  for (const auto& a : enumerate_actions(k)) {
    const double v = local_integrand(z, a, c, cov, b);
    if (v < best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

double LocalDerivative::combined_se() const {
  return std::hypot(analytic.std_error, finite_diff.std_error);
}

bool LocalDerivative::agrees(double se_mult, double rel_tol) const {
  const double tol = std::max(se_mult * combined_se(), rel_tol * std::abs(analytic.mean));
  return std::abs(analytic.mean - finite_diff.mean) <= tol;
}

LocalDerivative local_derivative_at_zero(const DecisionMap& proc, const IntraclassCov& cov, double b,
                                         const CriticalValues& c, const McConfig& mc, double h) {
  const std::size_t k = cov.k();
  check_dim(c.size(), k, "local derivative: constants length differs from k");
  if (k > kMaxEnumerationDim) throw CapacityError("local derivative: too many coordinates");
  if (std::abs(1.0 + b * cov.rho()) < 1e-15) throw DomainError("local derivative: 1 + b rho must be nonzero");
  if (!(h > 0.0)) throw DomainError("local derivative: step must be positive");
  if (mc.reps < 2) throw DomainError("local derivative: need at least two replications");

  const auto plus = lambda_weights(h, c, cov, b);
  const auto minus = lambda_weights(-h, c, cov, b);
  std::vector<std::size_t> labels;
  for (std::size_t m = 1; m < plus.weights.size(); ++m)
    if (plus.weights[m] != 0.0) labels.push_back(m);

  const std::vector<double> zero(k, 0.0);
  const DrawSet draws = sample_mvn(cov, zero, mc.reps, mc.seed, mc.threads);

  double sa = 0.0, sa2 = 0.0, sf = 0.0, sf2 = 0.0;
  std::vector<double> shifted(k);
  for (std::size_t r = 0; r < draws.n(); ++r) {
    const auto x = draws.row(r);
    const double va = local_integrand(x, proc(x), c, cov, b);
    sa += va;
    sa2 += va * va;

    double fd = 0.0;
    for (std::size_t m : labels) {
      const auto v = PartitionLabel::from_mask(m, k);
      for (std::size_t j = 0; j < k; ++j) shifted[j] = x[j] + (v[j] ? h : 0.0);
      const double lp = loss(proc(shifted), v, b);
      for (std::size_t j = 0; j < k; ++j) shifted[j] = x[j] - (v[j] ? h : 0.0);
      const double lm = loss(proc(shifted), v, b);
      fd += plus.weights[m] * lp - minus.weights[m] * lm;
    }
    fd /= 2.0 * h;
    sf += fd;
    sf2 += fd * fd;
  }

  const auto finish = [&](double s, double s2) {
    RiskEstimate e;
    const double n = static_cast<double>(draws.n());
    e.n_reps = draws.n();
    e.seed = mc.seed;
    e.mean = s / n;
    e.std_error = std::sqrt(std::max(0.0, (s2 - n * e.mean * e.mean) / (n - 1.0)) / n);
    return e;
  };
  return {finish(sa, sa2), finish(sf, sf2)};
}

RiskEstimate local_derivative_analytic(const DecisionMap& proc, const DrawSet& draws, const IntraclassCov& cov,
                                       double b, const CriticalValues& c) {
  if (draws.k() != cov.k()) throw DimensionError("local derivative: draw dimension mismatch");
  if (draws.n() < 2) throw DomainError("local derivative: need at least two draws");
  double s = 0.0, s2 = 0.0;
  for (std::size_t r = 0; r < draws.n(); ++r) {
    const auto x = draws.row(r);
    const double v = local_integrand(x, proc(x), c, cov, b);
    s += v;
    s2 += v * v;
  }
  RiskEstimate e;
  const double n = static_cast<double>(draws.n());
  e.n_reps = draws.n();
  e.mean = s / n;
  e.std_error = std::sqrt(std::max(0.0, (s2 - n * e.mean * e.mean) / (n - 1.0)) / n);
  return e;
}

DecisionMap reflection_swap(DecisionMap proc, std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw DimensionError("reflection swap: box bounds differ in length");
  bool separated = false;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) throw ConstructionError("reflection swap: empty box");
    if (lo[j] > 0.0 || hi[j] < 0.0) separated = true;
  }
  if (!separated) throw ConstructionError("reflection swap: box meets its reflection");

  return [proc = std::move(proc), lo = std::move(lo), hi = std::move(hi)](std::span<const double> z) {
    if (z.size() != lo.size()) throw DimensionError("reflection swap: dimension mismatch");
    bool in = true, in_neg = true;
    for (std::size_t j = 0; j < z.size(); ++j) {
      in = in && z[j] >= lo[j] && z[j] <= hi[j];
      in_neg = in_neg && -z[j] >= lo[j] && -z[j] <= hi[j];
    }
    if (!in && !in_neg) return proc(z);
    std::vector<double> neg(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) neg[j] = -z[j];
    return proc(neg);
  };
}

}  // namespace mcdt
