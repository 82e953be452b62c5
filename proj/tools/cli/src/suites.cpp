#include "mcdt_cli/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "mcdt/admissibility.hpp"
#include "mcdt/bayes.hpp"
#include "mcdt/critical_values.hpp"
#include "mcdt/error.hpp"
#include "mcdt/format.hpp"
#include "mcdt/risk.hpp"

namespace mcdt::cli {

namespace {

constexpr std::size_t kConstantsReps = 200'000;
constexpr ProcedureKind kStepwise[] = {ProcedureKind::SingleStep, ProcedureKind::StepDown, ProcedureKind::StepUp};

template <class T>
std::vector<T> sweep(const std::optional<T>& given, std::vector<T> defaults) {
  if (given) return {*given};
  return defaults;
}

std::vector<ProcedureKind> procedures(const SuiteParams& p, std::vector<ProcedureKind> defaults) {
  if (!p.procedure) return defaults;
  if (*p.procedure == ProcedureKind::AcceptAll || *p.procedure == ProcedureKind::RejectAll)
    throw DomainError("suite: reference rules have no critical constants");
  return {*p.procedure};
}

ProblemSpec make_spec(const SuiteParams& p, std::size_t k, double rho, double b) {
  ProblemSpec s;
  s.k = k;
  s.rho = rho;
  s.b = b;
  s.sigma2 = p.sigma2.value_or(1.0);
  s.alpha = p.alpha.value_or(0.05);
  s.variant = p.variant;
  s.validate();
  return s;
}

McConfig mc_config(const SuiteParams& p, std::size_t default_reps, std::uint64_t seed_offset = 0) {
  McConfig mc;
  mc.reps = p.mc_reps.value_or(default_reps);
  mc.seed = p.seed + seed_offset;
  mc.threads = p.threads;
  return mc;
}

CriticalValues constants_for(ProcedureKind kind, const ProblemSpec& spec, const SuiteParams& p,
                             std::size_t reps = kConstantsReps) {
  SolverOptions opts;
  opts.mc.reps = reps;
  opts.mc.seed = p.seed;
  opts.mc.threads = p.threads;
  switch (kind) {
    case ProcedureKind::SingleStep:
      return single_step_fwe_constant(spec, opts);
    case ProcedureKind::StepDown:
      return step_down_constants(spec, opts);
    case ProcedureKind::StepUp:
      return step_up_constants(spec, opts);
    default:
      throw DomainError("suite: reference rules have no critical constants");
  }
}

std::string tag(ProcedureKind kind, std::size_t k, double rho, double b) {
  return std::string(to_string(kind)) + ".k" + std::to_string(k) + ".rho" + format_double(rho) + ".b" +
         format_double(b);
}

double rel_tol(double scale) { return 1e-12 * std::max(1.0, std::abs(scale)); }

void common_header(Report& r, const SuiteParams& p) {
  r.set("seed", std::to_string(p.seed));
  r.set("variant", std::string(to_string(p.variant)));
  r.set("alpha", p.alpha.value_or(0.05));
  r.set("sigma2", p.sigma2.value_or(1.0));
}

Report suite_a1(const SuiteParams& p) {
  Report rep("a1");
  common_header(rep, p);
  const auto mc = mc_config(p, 100'000);
  rep.set("mc_reps", std::to_string(mc.reps));
  for (auto kind : procedures(p, {std::begin(kStepwise), std::end(kStepwise)})) {
    for (std::size_t k : sweep(p.k, {1, 2, 3, 4, 5})) {
      for (double b : sweep(p.b, {0.5, 1.0, 2.0})) {
        const double rho = p.rho.value_or(0.0);
        const auto spec = make_spec(p, k, rho, b);
        const auto c = constants_for(kind, spec, p);
        const auto table = origin_risk_table(make_procedure(kind, c), spec, mc);
        const double r0 = table.at(PartitionLabel::from_mask(0, k)).mean;
        const double r1 = table.at(PartitionLabel::from_mask((std::uint64_t{1} << k) - 1, k)).mean;
        const double kb = static_cast<double>(k) * b;
        const auto t = tag(kind, k, rho, b);
        rep.detail("origin " + t + " R0=" + format_double(r0) + " R1=" + format_double(r1) +
                   " expected_rejections=" + format_double(table.expected_rejections));
        rep.check_close("sum." + t, r0 + r1, kb, rel_tol(kb), "R0+R1 against k*b");
        rep.check_close("weighted." + t, b * r0 + r1, kb, rel_tol(kb), "b*R0+R1 against k*b");
      }
    }
  }
  return rep;
}

Report suite_aggregate(const SuiteParams& p) {
  Report rep("aggregate");
  common_header(rep, p);
  const auto mc = mc_config(p, 100'000);
  rep.set("mc_reps", std::to_string(mc.reps));
  for (auto kind : procedures(p, {std::begin(kStepwise), std::end(kStepwise)})) {
    for (std::size_t k : sweep(p.k, {2, 3, 4, 5})) {
      if (k < 2) throw DomainError("aggregate: needs k >= 2");
      for (double b : sweep(p.b, {0.5, 1.0, 2.0})) {
        const double rho = p.rho.value_or(0.0);
        const auto spec = make_spec(p, k, rho, b);
        const auto table = origin_risk_table(make_procedure(kind, constants_for(kind, spec, p)), spec, mc);
        for (std::size_t r = 1; r < k; ++r) {
          const auto id = gamma_r_aggregate(table, r);
          rep.check_close("gamma" + std::to_string(r) + "." + tag(kind, k, rho, b), id.lhs, id.rhs, rel_tol(id.rhs));
        }
      }
    }
  }
  return rep;
}

Report suite_fwe(const SuiteParams& p) {
  Report rep("fwe");
  common_header(rep, p);
  const auto mc = mc_config(p, 1'000'000, 1);
  const std::size_t solver_reps = 10 * mc.reps;
  rep.set("mc_reps", std::to_string(mc.reps));
  rep.set("solver_reps", std::to_string(solver_reps));
  rep.set("certification_seed", std::to_string(mc.seed));
  for (auto kind : procedures(p, {ProcedureKind::SingleStep, ProcedureKind::StepDown})) {
    for (std::size_t k : sweep(p.k, {2, 3, 5})) {
      for (double rho : sweep(p.rho, {0.0, 0.5})) {
        const double b = p.b.value_or(1.0);
        const auto spec = make_spec(p, k, rho, b);
        const auto c = constants_for(kind, spec, p, solver_reps);
        const auto cov = IntraclassCov::from(spec);
        const std::vector<double> zero(k, 0.0);
        const auto draws = sample_mvn(cov, zero, mc.reps, mc.seed, mc.threads);
        const ActionHistogram hist(make_procedure(kind, c), draws);
        const double n = static_cast<double>(hist.n());
        const double fwe = 1.0 - static_cast<double>(hist.counts()[0]) / n;
        const double se = std::sqrt(fwe * (1.0 - fwe) / n);
        const auto t = std::string(to_string(kind)) + ".k" + std::to_string(k) + ".rho" + format_double(rho);
        rep.detail("constants " + t + " values=" + format_list(c.values));
        rep.check_close("fwe." + t, fwe, spec.alpha, 3.0 * se, "se=" + format_double(se));
      }
    }
  }
  return rep;
}

Report suite_local_derivative(const SuiteParams& p) {
  Report rep("local-derivative");
  common_header(rep, p);
  const std::size_t k = p.k.value_or(3);
  const double rho = p.rho.value_or(0.3);
  const double b = p.b.value_or(1.0);
  const auto spec = make_spec(p, k, rho, b);
  const auto cov = IntraclassCov::from(spec);
  const auto mc = mc_config(p, 1'000'000);
  rep.set("k", std::to_string(k));
  rep.set("rho", rho);
  rep.set("b", b);
  rep.set("mc_reps", std::to_string(mc.reps));
  rep.set("fd_step", 1e-3);

  // pointwise minimizer of the integrand
  const auto c_ss = constants_for(ProcedureKind::SingleStep, spec, p);
  {
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    std::size_t tested = 0, skipped = 0, mismatched = 0;
    std::vector<double> z(k);
    for (std::size_t s = 0; s < 10'000; ++s) {
      bool tie = false;
      for (std::size_t i = 0; i < k; ++i) {
        z[i] = c_ss[i] + unif(rng);
        tie = tie || std::abs(z[i] - c_ss[i]) < 1e-12;
      }
      if (tie) {
        ++skipped;
        continue;
      }
      ++tested;
      mismatched += integrand_argmin(z, c_ss, cov, b) != single_step_decide(z, c_ss);
    }
    rep.detail("argmin tested=" + std::to_string(tested) + " skipped=" + std::to_string(skipped));
    rep.check_close("argmin.mismatches", static_cast<double>(mismatched), 0.0, 0.0);
  }

  for (auto kind : procedures(p, {std::begin(kStepwise), std::end(kStepwise)})) {
    const auto c = kind == ProcedureKind::SingleStep ? c_ss : constants_for(kind, spec, p);
    const auto d = local_derivative_at_zero(make_procedure(kind, c), cov, b, c, mc);
    const double tol = std::max(3.0 * d.combined_se(), 1e-3 * std::abs(d.analytic.mean));
    rep.detail("derivative " + std::string(to_string(kind)) + " analytic=" + format_double(d.analytic.mean) +
               " analytic_se=" + format_double(d.analytic.std_error) + " finite_diff=" +
               format_double(d.finite_diff.mean) + " finite_diff_se=" + format_double(d.finite_diff.std_error));
    rep.check_close("derivative." + std::string(to_string(kind)), d.finite_diff.mean, d.analytic.mean, tol);
  }

  // one-dimensional accept-everything oracle: -(1 + gamma) b C / sigma2
  {
    auto s1 = make_spec(p, 1, 0.0, b);
    const auto cov1 = IntraclassCov::from(s1);
    const auto c1 = per_comparison_constants(s1);
    const double gamma = local_gamma(b, 0.0);
    const double oracle = -(1.0 + gamma) * b * c1[0] / s1.sigma2;
    const auto d = local_derivative_at_zero(make_procedure(ProcedureKind::AcceptAll, c1), cov1, b, c1, mc);
    rep.check_close("accept-all.k1.analytic", d.analytic.mean, oracle, 3.0 * d.analytic.std_error);
    rep.check_close("accept-all.k1.finite_diff", d.finite_diff.mean, oracle, 1e-3 * std::abs(oracle));
  }

  // reflection-swap perturbations on antithetic draws: origin risks match exactly
  {
    const std::size_t half = std::max<std::size_t>(mc.reps / 5, 2);
    const std::vector<double> zero(k, 0.0);
    const auto base = sample_mvn(cov, zero, half, mc.seed + 7, mc.threads);
    DrawSet pooled(2 * half, k);
    for (std::size_t r = 0; r < half; ++r) {
      const auto x = base.row(r);
      auto a = pooled.row(2 * r);
      auto m = pooled.row(2 * r + 1);
      for (std::size_t j = 0; j < k; ++j) {
        a[j] = x[j];
        m[j] = -x[j];
      }
    }
    const auto single = make_procedure(ProcedureKind::SingleStep, c_ss);
    const ActionHistogram h_single(single, pooled);
    const auto d_single = local_derivative_analytic(single, pooled, cov, b, c_ss);
    std::mt19937_64 rng(p.seed + 11);
    // boxes straddle the first rejection boundary and stay clear of their reflection
    std::uniform_real_distribution<double> first(c_ss[0] - 0.5, c_ss[0] + 0.5), other(-2.0, 3.0), width(0.6, 1.0);
    std::size_t worse = 0, unmatched = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < 20; ++t) {
      std::vector<double> lo(k), hi(k);
      for (std::size_t j = 0; j < k; ++j) {
        const double centre = j == 0 ? first(rng) : other(rng);
        const double w = j == 0 ? std::min(width(rng), 0.5 * centre) : width(rng);
        lo[j] = centre - w;
        hi[j] = centre + w;
      }
      const auto pert = reflection_swap(single, lo, hi);
      const ActionHistogram h_pert(pert, pooled);
      for (std::size_t i = 0; i < k; ++i)
        unmatched += h_pert.rejection_rate(i, 0).mean != h_single.rejection_rate(i, 0).mean;
      const auto d = local_derivative_analytic(pert, pooled, cov, b, c_ss);
      const double slack = 3.0 * std::hypot(d.std_error, d_single.std_error);
      min_gap = std::min(min_gap, d.mean - d_single.mean);
      worse += d_single.mean > d.mean + slack;
    }
    rep.detail("perturbations count=20 pooled_draws=" + std::to_string(pooled.n()) +
               " single_step_derivative=" + format_double(d_single.mean) + " min_gap=" + format_double(min_gap));
    rep.check_close("perturbation.origin_risk_mismatches", static_cast<double>(unmatched), 0.0, 0.0);
    rep.check_close("perturbation.single_step_not_minimal", static_cast<double>(worse), 0.0, 0.0);
  }
  return rep;
}

Report suite_bayes_limit(const SuiteParams& p) {
  Report rep("bayes-limit");
  common_header(rep, p);
  const std::size_t k = p.k.value_or(3);
  if (p.rho && *p.rho != 0.0) throw DomainError("bayes-limit: requires rho = 0");
  if (p.sigma2 && *p.sigma2 != 1.0) throw DomainError("bayes-limit: requires sigma2 = 1");
  const auto spec = make_spec(p, k, 0.0, p.b.value_or(1.0));
  const auto c = step_down_constants(spec);
  LimitOptions opts;
  opts.b = spec.b;
  const auto schedule = default_limit_schedule();
  rep.set("k", std::to_string(k));
  rep.set("b", spec.b);
  rep.set("constants", format_list(c.values));
  rep.set("schedule", std::to_string(schedule.front()) + ".." + std::to_string(schedule.back()));
  rep.set("boundary_margin", opts.boundary_margin);
  rep.set("stable_run", std::to_string(opts.stable_run));

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unif(-1.0, 4.0);
  std::size_t conclusive = 0, stabilized = 0, matched = 0, monotone = 0, boundary = 0, boundary_flagged = 0;
  std::size_t boundary_mismatch = 0, latest = 0;
  std::vector<double> z(k);
  for (std::size_t guard = 0; conclusive < 200 && guard < 100'000; ++guard) {
    for (auto& zi : z) zi = unif(rng);
    const auto r = bayes_limit_action(z, spec, c, opts);
    if (r.min_margin <= opts.boundary_margin) {
      ++boundary;
      boundary_flagged += r.inconclusive;
      boundary_mismatch += !r.inconclusive && !r.matches_step_down;
      continue;
    }
    ++conclusive;
    if (r.limit_action) {
      ++stabilized;
      latest = std::max(latest, *r.stabilized_at);
    }
    matched += !r.inconclusive && r.matches_step_down;
    monotone += r.eventually_monotone;
  }
  // observations exactly on a comparison boundary
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> zb(k, c[0] - 1.0);
    for (std::size_t i = 0; i <= j; ++i) zb[i] = c[k - 1 - i] + 0.5 * static_cast<double>(j - i);
    zb[j] = c[k - 1 - j];
    const auto r = bayes_limit_action(zb, spec, c, opts);
    ++boundary;
    boundary_flagged += r.inconclusive;
  }
  rep.detail("observations conclusive=" + std::to_string(conclusive) + " boundary=" + std::to_string(boundary) +
             " latest_stabilization=" + std::to_string(latest) + " eventually_monotone=" + std::to_string(monotone));
  rep.check_close("conclusive.count", static_cast<double>(conclusive), 200.0, 0.0);
  rep.check_close("conclusive.stabilized", static_cast<double>(stabilized), static_cast<double>(conclusive), 0.0);
  rep.check_close("conclusive.match_step_down", static_cast<double>(matched), static_cast<double>(conclusive), 0.0);
  rep.check_close("boundary.flagged_inconclusive", static_cast<double>(boundary_flagged),
                  static_cast<double>(boundary), 0.0);
  rep.check_close("boundary.mismatches", static_cast<double>(boundary_mismatch), 0.0, 0.0);
  return rep;
}

Report suite_proper_bayes(const SuiteParams& p) {
  Report rep("proper-bayes");
  common_header(rep, p);
  // product prior against single-step on a grid
  {
    const std::size_t k = p.k.value_or(2);
    if (p.rho && *p.rho != 0.0) throw DomainError("proper-bayes: requires rho = 0");
    for (double b : sweep(p.b, {1.0, 2.0})) {
      const auto spec = make_spec(p, k, 0.0, b);
      const auto c = single_step_fwe_constant(spec);
      const auto prior = single_step_bayes_prior(c, b, spec);
      const auto cov = IntraclassCov::from(spec);
      const std::size_t per_axis = 101;
      std::size_t points = 1;
      for (std::size_t i = 0; i < k; ++i) points *= per_axis;
      std::size_t mismatched = 0;
      std::vector<double> z(k);
      for (std::size_t idx = 0; idx < points; ++idx) {
        std::size_t rem = idx;
        for (std::size_t i = 0; i < k; ++i) {
          z[i] = -4.0 + 0.1 * static_cast<double>(rem % per_axis);
          rem /= per_axis;
        }
        mismatched += bayes_decide(prior, z, cov, b) != single_step_decide(z, c);
      }
      rep.detail("grid b=" + format_double(b) + " k=" + std::to_string(k) + " points=" + std::to_string(points) +
                 " constant=" + format_double(c[0]));
      rep.check_close("grid.mismatches.b" + format_double(b), static_cast<double>(mismatched), 0.0, 0.0);
    }
  }

  // Bayes action against exhaustive minimization of posterior expected loss
  {
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::size_t failures = 0, exceptions = 0, normalization = 0;
    for (std::size_t inst = 0; inst < 200; ++inst) {
      const std::size_t k = p.k.value_or(1 + inst % 5);
      try {
        const double rho_lo = k > 1 ? -0.9 / static_cast<double>(k - 1) : -0.9;
        const double rho = rho_lo + (0.9 - rho_lo) * u01(rng);
        const double b = p.b.value_or(0.2 + 4.8 * u01(rng));
        const auto cov = IntraclassCov(k, p.sigma2.value_or(1.0), rho);
        const std::size_t atoms = 1 + static_cast<std::size_t>(u01(rng) * 8.0);
        std::vector<ParameterPoint> mus;
        std::vector<double> weights;
        for (std::size_t a = 0; a < atoms; ++a) {
          ParameterPoint mu(k);
          for (auto& m : mu) m = u01(rng) < 0.5 ? 0.0 : 3.0 * u01(rng) + 1e-3;
          mus.push_back(std::move(mu));
          weights.push_back(0.05 + u01(rng));
        }
        const auto prior = DiscretePrior::from_weights(mus, weights, p.variant);
        std::vector<double> z(k);
        for (auto& zi : z) zi = -2.0 + 6.0 * u01(rng);
        const auto post = posterior(prior, z, cov);
        double total = 0.0;
        for (double q : post.cell) total += q;
        normalization += std::abs(total - 1.0) > 1e-12;
        const auto chosen = bayes_action(post, b);
        const double chosen_loss = posterior_expected_loss(post, chosen, b);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : enumerate_actions(k)) best = std::min(best, posterior_expected_loss(post, a, b));
        failures += chosen_loss > best + 1e-12 * std::max(1.0, best);
      } catch (const Error&) {
        ++exceptions;
      }
    }
    rep.check_close("posterior_loss.not_minimal", static_cast<double>(failures), 0.0, 0.0);
    rep.check_close("posterior_loss.exceptions", static_cast<double>(exceptions), 0.0, 0.0);
    rep.check_close("posterior.normalization_failures", static_cast<double>(normalization), 0.0, 0.0);
  }
  return rep;
}

Report suite_monotonicity(const SuiteParams& p) {
  Report rep("monotonicity");
  common_header(rep, p);
  const std::size_t k = p.k.value_or(3);
  ScanOptions scan;
  scan.seed = p.seed;
  rep.set("k", std::to_string(k));
  rep.set("sections", std::to_string(scan.sections));
  rep.set("grid", format_double(scan.lo) + ":" + format_double(scan.hi) + ":" + format_double(scan.step));
  for (auto kind : procedures(p, {std::begin(kStepwise), std::end(kStepwise)})) {
    std::vector<double> rhos = kind == ProcedureKind::SingleStep ? std::vector<double>{-0.2, 0.0, 0.5}
                                                                   : std::vector<double>{0.0, 0.25, 0.5};
    for (double rho : sweep(p.rho, rhos)) {
      const auto spec = make_spec(p, k, rho, p.b.value_or(1.0));
      const auto cov = IntraclassCov::from(spec);
      const auto c = constants_for(kind, spec, p);
      const auto proc = make_procedure(kind, c);
      const auto r = section_monotonicity_scan(proc, cov, c, scan);
      const auto t = std::string(to_string(kind)) + ".k" + std::to_string(k) + ".rho" + format_double(rho);
      rep.detail("scan " + t + " points=" + std::to_string(r.points) + " ties_skipped=" +
                 std::to_string(r.ties_skipped) + " violations=" + std::to_string(r.violations.size()));
      for (std::size_t v = 0; v < std::min<std::size_t>(r.violations.size(), 5); ++v)
        rep.detail("violation " + t + " y_before=" + format_list(r.violations[v].y_before) +
                   " y_after=" + format_list(r.violations[v].y_after));
      if (kind == ProcedureKind::SingleStep || rho >= 0.0) {
        rep.check_close("violations." + t, static_cast<double>(r.violations.size()), 0.0, 0.0);
      } else {
        // negative correlation: a violation is expected near the boundary construction
        std::vector<double> centre;
        if (kind == ProcedureKind::StepUp) {
          centre = stepup_counterexample_center(c);
        } else {
          centre.assign(k, c[k - 1]);
          centre[0] = 0.5 * (c[k - 2] + c[k - 1]);
        }
        LocalSearchOptions ls;
        ls.seed = p.seed;
        const auto near = local_section_search(proc, cov, c, centre, ls);
        rep.check_true("violation_found." + t, !r.violations.empty() || near.sections_with_violation > 0,
                       "local_sections_with_violation=" + std::to_string(near.sections_with_violation));
      }
    }
  }
  return rep;
}

Report suite_counterexample(const SuiteParams& p) {
  Report rep("counterexample");
  common_header(rep, p);
  for (std::size_t k : sweep(p.k, {2, 3})) {
    for (double rho : sweep(p.rho, {-0.05, -0.2, -0.4})) {
      const auto spec = make_spec(p, k, rho, p.b.value_or(1.0));
      const auto cov = IntraclassCov::from(spec);
      const auto t = "k" + std::to_string(k) + ".rho" + format_double(rho);
      if (!p.procedure || *p.procedure == ProcedureKind::StepDown) {
        const auto c = constants_for(ProcedureKind::StepDown, spec, p);
        const double eps = p.epsilon.value_or(std::min(0.1, (c[k - 1] - c[k - 2]) / (4.0 * spec.sigma2)));
        const auto r = counterexample_negative_rho(spec, c, eps);
        rep.detail("construction " + t + " constants=" + format_list(c.values) + " epsilon=" + format_double(eps));
        rep.detail("construction " + t + " z_star=" + format_list(r.z_star) + " z_star_star=" +
                   format_list(r.z_star_star));
        rep.detail("construction " + t + " y_star=" + format_list(r.y_star) + " y_star_star=" +
                   format_list(r.y_star_star) + " y_difference=" + format_list(r.y_difference));
        rep.check_true("step-down.accept_at_z_star." + t, r.accepts_at_star);
        rep.check_true("step-down.reject_at_z_star_star." + t, r.rejects_at_star_star);
        double dev = std::abs(r.y_difference[0] - eps);
        for (std::size_t j = 1; j < k; ++j) dev = std::max(dev, std::abs(r.y_difference[j]));
        rep.check_close("step-down.y_difference." + t, dev, 0.0, 1e-12);
      }
      if (!p.procedure || *p.procedure == ProcedureKind::StepUp) {
        const auto c = constants_for(ProcedureKind::StepUp, spec, p);
        LocalSearchOptions ls;
        ls.seed = p.seed;
        const auto centre = stepup_counterexample_center(c);
        const auto near = local_section_search(make_procedure(ProcedureKind::StepUp, c), cov, c, centre, ls);
        rep.detail("step-up " + t + " constants=" + format_list(c.values) + " centre=" + format_list(centre) +
                   " sections_with_violation=" + std::to_string(near.sections_with_violation));
        if (!near.violations.empty())
          rep.detail("step-up " + t + " y_before=" + format_list(near.violations.front().y_before) +
                     " y_after=" + format_list(near.violations.front().y_after));
        rep.check_true("step-up.violation_found." + t, near.sections_with_violation > 0);
      }
    }
  }
  return rep;
}

Report suite_delta_psi(const SuiteParams& p) {
  Report rep("delta-psi");
  common_header(rep, p);
  const auto mc = mc_config(p, 20'000);
  rep.set("mc_reps", std::to_string(mc.reps));
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t k : sweep(p.k, {2, 3})) {
    for (std::size_t t = 0; t < 50; ++t) {
      const auto spec = make_spec(p, k, p.rho.value_or(0.0), p.b.value_or(1.0));
      const auto actions = enumerate_actions(k);
      std::vector<std::vector<double>> w(actions.size(), std::vector<double>(k + 1));
      for (auto& row : w)
        for (auto& x : row) x = gauss(rng);
      const RandomizedRule delta = [actions, w](std::span<const double> z) {
        std::vector<double> s(actions.size());
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < actions.size(); ++a) {
          s[a] = w[a].back();
          for (std::size_t j = 0; j < z.size(); ++j) s[a] += w[a][j] * z[j];
          top = std::max(top, s[a]);
        }
        double total = 0.0;
        for (auto& x : s) total += x = std::exp(x - top);
        std::map<ActionVector, double> mass;
        for (std::size_t a = 0; a < actions.size(); ++a) mass[actions[a]] = s[a] / total;
        return DecisionRuleMass(std::move(mass));
      };
      const TestFunction psi = [delta](std::span<const double> z) { return induced_tests(delta(z)); };
      ParameterPoint mu(k);
      for (auto& m : mu) m = u01(rng) < 0.5 ? 0.0 : 3.0 * u01(rng);
      const double lhs = rule_mass_risk(delta, mu, spec, mc).mean;
      const double rhs = risk_scalar(psi, mu, spec, mc).mean;
      worst = std::max(worst, std::abs(lhs - rhs));
      ++count;
      rep.check_close("reduction.k" + std::to_string(k) + ".rule" + std::to_string(t), lhs, rhs, 1e-12);
    }
  }
  rep.set("rules", std::to_string(count));
  rep.set("max_abs_difference", worst);
  return rep;
}

}  // namespace

const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> names = {"a1",          "aggregate",    "fwe",
                                                      "local-derivative", "bayes-limit", "proper-bayes",
                                                      "monotonicity", "counterexample", "delta-psi"};
  return names;
}

bool is_suite(std::string_view name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

Report run_suite(std::string_view name, const SuiteParams& params) {
  if (name == "a1") return suite_a1(params);
  if (name == "aggregate") return suite_aggregate(params);
  if (name == "fwe") return suite_fwe(params);
  if (name == "local-derivative") return suite_local_derivative(params);
  if (name == "bayes-limit") return suite_bayes_limit(params);
  if (name == "proper-bayes") return suite_proper_bayes(params);
  if (name == "monotonicity") return suite_monotonicity(params);
  if (name == "counterexample") return suite_counterexample(params);
  if (name == "delta-psi") return suite_delta_psi(params);
  throw DomainError("unknown suite: " + std::string(name));
}

}  // namespace mcdt::cli
