#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "mcdt/admissibility.hpp"
#include "mcdt/error.hpp"

using namespace mcdt;
using Catch::Matchers::WithinAbs;

namespace {
std::vector<double> v(std::initializer_list<double> x) { return x; }
}  // namespace

TEST_CASE("y coordinates", "[admissibility]") {
  const IntraclassCov unit(3, 1.0, 0.0);
  const auto z = v({0.3, -1.2, 2.0});
  CHECK(to_y(z, unit) == z);

  const IntraclassCov c(3, 1.0, 0.5);
  for (double y : to_y(v({1, 1, 1}), c)) CHECK_THAT(y, WithinAbs(0.5, 1e-12));

  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (double rho : {-0.3, 0.2, 0.7}) {
    const IntraclassCov cov(4, 2.0, rho);
    for (int r = 0; r < 100; ++r) {
      const std::vector<double> x{n(rng), n(rng), n(rng), n(rng)};
      const auto back = to_z(to_y(x, cov), cov);
      for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(back[i], WithinAbs(x[i], 1e-10));
    }
  }
}

TEST_CASE("single-step section form", "[admissibility]") {
  const auto c = make_critical_values({1.95, 1.95, 1.95}, Provenance::SingleStepFWE);
  const IntraclassCov unit(3, 1.0, 0.0);
  CHECK(single_step_section_form(v({2.0, -9, 9}), c, unit));
  CHECK_FALSE(single_step_section_form(v({1.9, 9, 9}), c, unit));

  const IntraclassCov cov(3, 1.0, 0.5);
  for (double y1 = -3; y1 <= 3; y1 += 0.25)
    for (double y2 = -3; y2 <= 3; y2 += 0.5)
      for (double y3 = -3; y3 <= 3; y3 += 0.5) {
        const auto y = v({y1, y2, y3});
        const auto z = to_z(y, cov);
        if (std::abs(z[0] - 1.95) < 1e-9) continue;
        for (std::size_t i = 0; i < 3; ++i) {
          if (std::abs(z[i] - 1.95) < 1e-9) continue;
          CHECK(single_step_section_form(y, c, cov, i) == single_step_decide(z, c)[i]);
        }
      }
}

TEST_CASE("step-down section threshold", "[admissibility]") {
  const auto c = make_critical_values({1.6449, 1.9545, 2.1212}, Provenance::StepDown);
  CHECK(stepdown_section_threshold(v({1.0, 2.0}), c) == c[2]);
  CHECK(stepdown_section_threshold(v({2.5, 1.0}), c) == c[1]);
  CHECK(stepdown_section_threshold(v({2.5, 2.0}), c) == c[0]);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 3.5);
  std::size_t checked = 0;
  for (int r = 0; r < 10000; ++r) {
    const auto z = v({u(rng), u(rng), u(rng)});
    const std::vector<double> rest{z[1], z[2]};
    const double t = stepdown_section_threshold(rest, c);
    if (std::abs(z[0] - t) < 1e-12) continue;
    CHECK((z[0] > t) == step_down_decide(z, c)[0]);
    ++checked;
    // raising any other coordinate cannot raise the threshold
    const std::vector<double> up{z[1] + 0.3, z[2]};
    CHECK(stepdown_section_threshold(up, c) <= t);
  }
  CHECK(checked > 9900);
}

TEST_CASE("section scans", "[admissibility]") {
  const auto sd = make_critical_values({1.6449, 1.9545, 2.1212}, Provenance::StepDown);
  const auto ss = make_critical_values({2.1212, 2.1212, 2.1212}, Provenance::SingleStepFWE);
  ScanOptions o;
  o.sections = 40;
  for (double rho : {0.0, 0.25, 0.5}) {
    const IntraclassCov cov(3, 1.0, rho);
    CHECK(section_monotonicity_scan(make_procedure(ProcedureKind::StepDown, sd), cov, sd, o).violations.empty());
    CHECK(section_monotonicity_scan(make_procedure(ProcedureKind::SingleStep, ss), cov, ss, o).violations.empty());
  }
  const IntraclassCov neg(3, 1.0, -0.2);
  CHECK(section_monotonicity_scan(make_procedure(ProcedureKind::SingleStep, ss), neg, ss, o).violations.empty());

  ProblemSpec s;
  s.k = 3;
  s.rho = -0.2;
  const auto ce = counterexample_negative_rho(s, sd, 0.05);
  const auto local = local_section_search(make_procedure(ProcedureKind::StepDown, sd), neg, sd, ce.z_star);
  CHECK_FALSE(local.violations.empty());
}

TEST_CASE("negative correlation counterexample", "[admissibility]") {
  ProblemSpec s;
  s.k = 2;
  s.rho = -0.4;
  const auto c = make_critical_values({1.6449, 1.9545}, Provenance::StepDown);
  const auto r = counterexample_negative_rho(s, c, 0.1);
  CHECK_THAT(r.z_star[0], WithinAbs(1.7997, 1e-12));
  CHECK_THAT(r.z_star[1], WithinAbs(1.9545, 1e-12));
  CHECK_THAT(r.z_star_star[0], WithinAbs(1.6997, 1e-12));
  CHECK_THAT(r.z_star_star[1], WithinAbs(1.9945, 1e-12));
  CHECK_THAT(r.y_difference[0], WithinAbs(0.1, 1e-12));
  CHECK_THAT(r.y_difference[1], WithinAbs(0.0, 1e-12));
  CHECK(r.verified());

  CHECK_THROWS_AS(counterexample_negative_rho(s, c, 0.5), ConstructionError);
  CHECK_THROWS_AS(counterexample_negative_rho(s, c, -0.1), ConstructionError);
  s.rho = 0.0;
  CHECK_THROWS_AS(counterexample_negative_rho(s, c, 0.1), DomainError);
}

TEST_CASE("local weights", "[admissibility]") {
  CHECK_THAT(local_gamma(1.0, 0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(local_gamma(2.0, -0.25), WithinAbs(0.2, 1e-15));
  CHECK_THROWS(local_gamma(1.0, 1.0));

  const auto c = make_critical_values({1.6, 1.9, 2.1}, Provenance::StepDown);
  const IntraclassCov cov(3, 1.0, 0.3);
  const auto w = lambda_weights(0.0, c, cov, 1.5);
  CHECK(w.weight(PartitionLabel{0, 0, 0}) == 1.0);
  for (const auto& e : w.unit_labels()) CHECK(w.weight(e) == 1.0);
  CHECK(w.weight(PartitionLabel{1, 1, 1}) == Catch::Approx(local_gamma(1.5, 0.3)));
  CHECK(w.weight(PartitionLabel{1, 1, 0}) == 0.0);
  const auto w1 = lambda_weights(0.2, c, cov, 1.5);
  CHECK(w1.weight(PartitionLabel{1, 0, 0}) < 1.0);
}

TEST_CASE("pointwise minimizer is single-step", "[admissibility]") {
  const auto c2 = make_critical_values({1.95, 1.95}, Provenance::SingleStepFWE);
  const IntraclassCov unit(2, 1.0, 0.0);
  CHECK(integrand_argmin(v({3, 0}), c2, unit, 1.0) == ActionVector{1, 0});
  CHECK(integrand_argmin(v({1, -2}), c2, unit, 1.0) == ActionVector{0, 0});

  const auto c3 = make_critical_values({2.0, 2.0, 2.0}, Provenance::SingleStepFWE);
  const IntraclassCov cov(3, 1.0, 0.3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 5.0);
  for (int r = 0; r < 2000; ++r) {
    const auto z = v({u(rng), u(rng), u(rng)});
    CHECK(integrand_argmin(z, c3, cov, 1.0) == single_step_decide(z, c3));
  }
}

TEST_CASE("analytic derivative matches the finite difference", "[admissibility]") {
  const auto c = make_critical_values({1.6449}, Provenance::PerComparison);
  const IntraclassCov one(1, 1.0, 0.0);
  McConfig mc;
  mc.reps = 200'000;
  mc.seed = 3;
  const auto d = local_derivative_at_zero(make_procedure(ProcedureKind::AcceptAll, c), one, 1.0, c, mc);
  const double want = -(1.0 + local_gamma(1.0, 0.0)) * 1.0 * 1.6449;
  CHECK_THAT(d.finite_diff.mean, WithinAbs(want, 1e-3 * std::abs(want)));
  CHECK(std::abs(d.analytic.mean - want) <= 3.0 * d.analytic.std_error + 1e-12);

  const auto c3 = make_critical_values({1.8, 1.8, 1.8}, Provenance::SingleStepFWE);
  const IntraclassCov cov(3, 1.0, 0.3);
  const auto s = local_derivative_at_zero(make_procedure(ProcedureKind::SingleStep, c3), cov, 1.0, c3, mc);
  CHECK(s.agrees());
}

TEST_CASE("reflection swap", "[admissibility]") {
  const auto c = make_critical_values({1.8, 1.8}, Provenance::SingleStepFWE);
  const auto base = make_procedure(ProcedureKind::SingleStep, c);
  const auto swapped = reflection_swap(base, v({1.5, -0.5}), v({2.5, 0.5}));
  CHECK(swapped(v({2.0, 0.0})) == base(v({-2.0, 0.0})));
  CHECK(swapped(v({-2.0, 0.0})) == base(v({2.0, 0.0})));
  CHECK(swapped(v({4.0, 4.0})) == base(v({4.0, 4.0})));
  CHECK_THROWS_AS(reflection_swap(base, v({-1, -1}), v({1, 1})), ConstructionError);
}

TEST_CASE("dichotomy at the zero-correlation boundary", "[admissibility]") {
  const auto sd = make_critical_values({1.6449, 1.9545, 2.1212}, Provenance::StepDown);
  ScanOptions o;
  o.sections = 60;
  const IntraclassCov pos(3, 1.0, 0.05);
  CHECK(section_monotonicity_scan(make_procedure(ProcedureKind::StepDown, sd), pos, sd, o).violations.empty());
  CHECK(section_monotonicity_scan(make_procedure(ProcedureKind::StepUp, sd), pos, sd, o).violations.empty());

  ProblemSpec s;
  s.k = 3;
  s.rho = -0.05;
  CHECK(counterexample_negative_rho(s, sd, 0.05).verified());
}

TEST_CASE("gamma is positive exactly when 1 + b rho is", "[admissibility]") {
  for (double b = 0.25; b <= 8.0; b *= 1.5)
    for (double rho = -0.95; rho < 0.99; rho += 0.05) {
      if (std::abs(1.0 + b * rho) < 1e-12) continue;
      CHECK((local_gamma(b, rho) > 0.0) == (1.0 + b * rho > 0.0));
    }
}
