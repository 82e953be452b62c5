#include "catch_amalgamated.hpp"

#include <cmath>

#include "mcdt/error.hpp"
#include "mcdt/risk.hpp"

using namespace mcdt;
using Catch::Matchers::WithinAbs;

namespace {

ProblemSpec spec2(double b = 1.0) {
  ProblemSpec s;
  s.k = 2;
  s.b = b;
  return s;
}

McConfig mc(std::size_t reps = 400'000, std::uint64_t seed = 11) {
  McConfig m;
  m.reps = reps;
  m.seed = seed;
  return m;
}

const auto pc = make_critical_values({1.6448536269514722, 1.6448536269514722}, Provenance::PerComparison);

}  // namespace

TEST_CASE("per-comparison risk at the origin and off it", "[risk]") {
  const auto proc = make_procedure(ProcedureKind::SingleStep, pc);
  const std::vector<double> zero{0.0, 0.0};
  const auto r0 = risk_scalar(proc, zero, spec2(), mc());
  CHECK(std::abs(r0.mean - 0.10) <= 3.0 * r0.std_error);
  CHECK(r0.n_reps == 400'000u);

  const std::vector<double> shifted{3.0, 0.0};
  const auto r1 = risk_scalar(proc, shifted, spec2(), mc());
  const double want = std_normal_cdf(1.6448536269514722 - 3.0) + 0.05;
  CHECK_THAT(want, WithinAbs(0.1377, 1e-4));
  CHECK(std::abs(r1.mean - want) <= 3.0 * r1.std_error);
}

TEST_CASE("reference rules give exact risks", "[risk]") {
  for (double b : {0.3, 1.0, 4.0}) {
    ProblemSpec s;
    s.k = 3;
    s.b = b;
    const auto c = make_critical_values({1, 2, 3}, Provenance::StepDown);
    const std::vector<double> zero(3, 0.0), pos{1.0, 2.0, 0.0};
    CHECK(risk_scalar(make_procedure(ProcedureKind::RejectAll, c), zero, s, mc(1000)).mean == 3.0);
    CHECK(risk_scalar(make_procedure(ProcedureKind::AcceptAll, c), pos, s, mc(1000)).mean == Catch::Approx(2.0 * b));
    const auto vec = risk_vector(make_procedure(ProcedureKind::AcceptAll, c), std::vector<double>(3, 1.0), s, mc(1000));
    for (const auto& e : vec) CHECK(e.mean == Catch::Approx(b));
  }
}

TEST_CASE("risk vector per-test size", "[risk]") {
  const auto proc = make_procedure(ProcedureKind::SingleStep, pc);
  const std::vector<double> zero{0.0, 0.0};
  const auto vec = risk_vector(proc, zero, spec2(), mc());
  REQUIRE(vec.size() == 2);
  for (const auto& e : vec) CHECK(std::abs(e.mean - 0.05) <= 3.0 * e.std_error);
  const auto total = risk_scalar(proc, zero, spec2(), mc());
  CHECK_THAT(vec[0].mean + vec[1].mean, WithinAbs(total.mean, 1e-12));
}

TEST_CASE("composite null risk counts rejections when mu_i <= 0", "[risk]") {
  ProblemSpec s = spec2();
  s.variant = Variant::CompositeNull;
  const auto proc = make_procedure(ProcedureKind::SingleStep, pc);
  const std::vector<double> neg{-1.0, -1.0};
  const auto r = risk_scalar(proc, neg, s, mc());
  const double want = 2.0 * std_normal_sf(1.6448536269514722 + 1.0);
  CHECK(std::abs(r.mean - want) <= 3.0 * r.std_error + 1e-12);
  CHECK_THROWS_AS(risk_scalar(proc, neg, spec2(), mc(1000)), DomainError);
}

TEST_CASE("origin risk table", "[risk]") {
  const auto fwe = make_critical_values({1.9545, 1.9545}, Provenance::SingleStepFWE);
  const auto proc = make_procedure(ProcedureKind::SingleStep, fwe);
  const auto t = origin_risk_table(proc, spec2(), mc());
  // R at v = 0 is the expected number of rejections; under independence 2 sf(C)
  const double want = 2.0 * std_normal_sf(1.9545);
  const auto& r00 = t.at(PartitionLabel{0, 0});
  CHECK(std::abs(r00.mean - want) <= 3.0 * r00.std_error);
  CHECK_THAT(t.at(PartitionLabel{0, 0}).mean + t.at(PartitionLabel{1, 1}).mean, WithinAbs(2.0, 1e-12));
  CHECK_THAT(r00.mean, WithinAbs(t.expected_rejections, 1e-15));

  const auto acc = origin_risk_table(make_procedure(ProcedureKind::AcceptAll, fwe), spec2(2.5), mc(1000));
  for (std::uint64_t m = 0; m < 4; ++m) {
    const auto v = PartitionLabel::from_mask(m, 2);
    CHECK(acc.at(v).mean == Catch::Approx(2.5 * v.count()));
  }
}

TEST_CASE("label-weighted origin identity holds for any b", "[risk]") {
  for (double b : {0.5, 1.0, 2.0}) {
    ProblemSpec s;
    s.k = 3;
    s.b = b;
    const auto c = make_critical_values({1.6, 1.9, 2.1}, Provenance::StepDown);
    const auto t = origin_risk_table(make_procedure(ProcedureKind::StepDown, c), s, mc(50'000));
    const double lhs = b * t.at(PartitionLabel{0, 0, 0}).mean + t.at(PartitionLabel{1, 1, 1}).mean;
    CHECK_THAT(lhs, WithinAbs(3.0 * b, 1e-12));
  }
}

TEST_CASE("aggregate identity over labels with r ones", "[risk]") {
  for (std::size_t k = 2; k <= 5; ++k) {
    for (double b : {0.5, 1.0, 3.0}) {
      ProblemSpec s;
      s.k = k;
      s.b = b;
      s.rho = 0.2;
      std::vector<double> vals;
      for (std::size_t j = 0; j < k; ++j) vals.push_back(1.5 + 0.2 * static_cast<double>(j));
      const auto c = make_critical_values(vals, Provenance::StepDown);
      const auto t = origin_risk_table(make_procedure(ProcedureKind::StepDown, c), s, mc(20'000));
      for (std::size_t r = 1; r < k; ++r) {
        const auto a = gamma_r_aggregate(t, r);
        CHECK_THAT(a.lhs, WithinAbs(a.rhs, 1e-12 * std::max(1.0, std::abs(a.rhs))));
      }
      CHECK_THROWS_AS(gamma_r_aggregate(t, 0), DomainError);
      CHECK_THROWS_AS(gamma_r_aggregate(t, k), DomainError);
    }
  }
  const auto c = make_critical_values({1.6, 1.9}, Provenance::StepDown);
  const auto two = gamma_r_aggregate(make_procedure(ProcedureKind::StepDown, c), 1, spec2(1.0), mc(10'000));
  CHECK_THAT(two.rhs, WithinAbs(2.0, 1e-12));
}

TEST_CASE("randomized rule risk", "[risk]") {
  ProblemSpec s = spec2();
  const std::vector<double> zero{0.0, 0.0};
  const auto u = rule_mass_risk([](std::span<const double>) { return DecisionRuleMass::uniform(2); }, zero, s, mc(1000));
  CHECK(u.mean == Catch::Approx(1.0));

  const auto proc = make_procedure(ProcedureKind::SingleStep, pc);
  const std::vector<double> mu{1.0, 0.0};
  const auto point = rule_mass_risk([&](std::span<const double> z) { return DecisionRuleMass::point_mass(proc(z)); }, mu,
                                    s, mc(50'000));
  const auto direct = risk_scalar(proc, mu, s, mc(50'000));
  CHECK_THAT(point.mean, WithinAbs(direct.mean, 1e-12));

  const DecisionRuleMass fixed({{ActionVector{0, 0}, 0.1}, {ActionVector{1, 0}, 0.2}, {ActionVector{0, 1}, 0.3}, {ActionVector{1, 1}, 0.4}});
  const auto mass = rule_mass_risk([&](std::span<const double>) { return fixed; }, mu, s, mc(1000));
  const auto psi = induced_tests(fixed);
  const auto viapsi = risk_scalar([&](std::span<const double>) { return psi; }, mu, s, mc(1000));
  CHECK_THAT(mass.mean, WithinAbs(viapsi.mean, 1e-12));
  // v = (1, 0): loss is b (1 - psi_1) + psi_2
  CHECK_THAT(mass.mean, WithinAbs((1.0 - psi[0]) + psi[1], 1e-12));
}

TEST_CASE("binomial coefficients", "[risk]") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(4, 0) == 1.0);
  CHECK(binomial(3, 4) == 0.0);
}

TEST_CASE("risk is reproducible from the seed", "[risk]") {
  const auto proc = make_procedure(ProcedureKind::SingleStep, pc);
  const std::vector<double> mu{0.5, 0.5};
  const auto a = risk_scalar(proc, mu, spec2(), mc(30'000, 5));
  const auto b = risk_scalar(proc, mu, spec2(), mc(30'000, 5));
  CHECK(a.mean == b.mean);
  CHECK(a.seed == 5u);
}
