#include "catch_amalgamated.hpp"

#include <set>

#include "mcdt/error.hpp"
#include "mcdt/model.hpp"

using namespace mcdt;

TEST_CASE("loss counts false rejections and weighted false acceptances", "[model]") {
  CHECK(loss(ActionVector{1, 1, 0}, PartitionLabel{1, 0, 0}, 2.0) == 1.0);
  CHECK(loss(ActionVector{0, 0}, PartitionLabel{1, 1}, 2.5) == 5.0);
  for (std::uint64_t m = 0; m < 8; ++m)
    CHECK(loss(ActionVector::from_mask(m, 3), PartitionLabel::from_mask(m, 3), 3.7) == 0.0);
}

TEST_CASE("loss matches the linear form on every pair", "[model]") {
  const double b = 1.75;
  for (std::uint64_t am = 0; am < 16; ++am) {
    for (std::uint64_t vm = 0; vm < 16; ++vm) {
      const auto a = ActionVector::from_mask(am, 4);
      const auto v = PartitionLabel::from_mask(vm, 4);
      double ones_a = 0, ones_v = 0, both = 0;
      for (std::size_t i = 0; i < 4; ++i) {
        ones_a += a[i];
        ones_v += v[i];
        both += a[i] && v[i];
      }
      CHECK(loss(a, v, b) == Catch::Approx(ones_a + b * ones_v - (1 + b) * both));
    }
  }
  CHECK_THROWS_AS(loss(ActionVector{1}, PartitionLabel{1, 0}, 1.0), DimensionError);
}

TEST_CASE("classify_partition by variant", "[model]") {
  const std::vector<double> a{0.0, 2.3};
  CHECK(classify_partition(a, Variant::PointNull) == PartitionLabel{0, 1});
  const std::vector<double> b{-1.2, 0.1};
  CHECK(classify_partition(b, Variant::CompositeNull) == PartitionLabel{0, 1});
  CHECK_THROWS_AS(classify_partition(b, Variant::PointNull), DomainError);
  const std::vector<double> z(3, 0.0);
  CHECK(classify_partition(z, Variant::PointNull) == PartitionLabel{0, 0, 0});
}

TEST_CASE("enumerate_actions uses binary counting order", "[model]") {
  const auto one = enumerate_actions(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0] == ActionVector{0});
  CHECK(one[1] == ActionVector{1});

  const auto two = enumerate_actions(2);
  REQUIRE(two.size() == 4);
  CHECK(two[1] == ActionVector{1, 0});
  CHECK(two[2] == ActionVector{0, 1});
  CHECK(two[3] == ActionVector{1, 1});

  const auto three = enumerate_actions(3);
  CHECK(std::set<ActionVector>(three.begin(), three.end()).size() == 8);
  CHECK_THROWS_AS(enumerate_actions(kMaxEnumerationDim + 1), CapacityError);
}

TEST_CASE("labels_with_count sizes are binomial", "[model]") {
  CHECK(labels_with_count(4, 2).size() == 6);
  CHECK(labels_with_count(5, 0).size() == 1);
  for (const auto& v : labels_with_count(5, 3)) CHECK(v.count() == 3);
}

TEST_CASE("induced tests of randomized rules", "[model]") {
  const auto u = induced_tests(DecisionRuleMass::uniform(2));
  CHECK(u[0] == Catch::Approx(0.5));
  CHECK(u[1] == Catch::Approx(0.5));

  const auto p = induced_tests(DecisionRuleMass::point_mass(ActionVector{1, 0}));
  CHECK(p == std::vector<double>{1.0, 0.0});

  const auto h = induced_tests(DecisionRuleMass({{ActionVector{1, 1}, 0.5}, {ActionVector{0, 1}, 0.5}}));
  CHECK(h[0] == Catch::Approx(0.5));
  CHECK(h[1] == Catch::Approx(1.0));

  CHECK_THROWS_AS(DecisionRuleMass({{ActionVector{1, 1}, 0.5}}), DomainError);
  CHECK_THROWS_AS(DecisionRuleMass({{ActionVector{1, 1}, 1.5}, {ActionVector{0, 1}, -0.5}}), DomainError);
}

TEST_CASE("problem spec validation", "[model]") {
  ProblemSpec s;
  s.k = 3;
  CHECK_NOTHROW(s.validate());
  s.alpha = 1.5;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.alpha = 0.05;
  s.rho = -0.5;
  CHECK_THROWS(s.validate());
  s.rho = 1.0;
  CHECK_THROWS(s.validate());
  s.k = 1;
  s.rho = -3.0;
  CHECK_NOTHROW(s.validate());
  s.b = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
}

TEST_CASE("bit vectors print and order", "[model]") {
  CHECK(ActionVector{1, 0, 1}.to_string() == "(1,0,1)");
  CHECK(ActionVector::from_mask(5, 3) == ActionVector{1, 0, 1});
  CHECK(ActionVector{1, 0, 1}.mask() == 5u);
  CHECK(PartitionLabel{1, 1, 0}.count() == 2);
}
