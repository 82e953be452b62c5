#include "mcdt/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "mcdt/error.hpp"

namespace mcdt {

std::string_view to_string(Variant v) {
  return v == Variant::PointNull ? "point" : "composite";
}

void ProblemSpec::validate() const {
  if (k < 1) throw DomainError("k must be at least 1");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("sigma2 must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("b must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!std::isfinite(rho)) throw DomainError("rho must be finite");
  if (k >= 2) {
    const double lower = -1.0 / static_cast<double>(k - 1);
    if (!(rho > lower && rho < 1.0)) {
      std::ostringstream os;
      os << "rho=" << rho << " outside (" << lower << ", 1) for k=" << k;
      throw DomainError(os.str());
    }
  }
}

DecisionRuleMass::DecisionRuleMass(std::map<ActionVector, double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw DomainError("decision rule mass is empty");
  k_ = mass_.begin()->first.size();
  double total = 0.0;
  for (const auto& [a, w] : mass_) {
    if (a.size() != k_) throw DimensionError("decision rule mass mixes action lengths");
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("decision rule weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("decision rule weights must sum to 1");
}

DecisionRuleMass DecisionRuleMass::point_mass(const ActionVector& a) {
  return DecisionRuleMass({{a, 1.0}});
}

DecisionRuleMass DecisionRuleMass::uniform(std::size_t k) {
  const auto actions = enumerate_actions(k);
  const double w = 1.0 / static_cast<double>(actions.size());
  std::map<ActionVector, double> m;
  for (const auto& a : actions) m.emplace(a, w);
  return DecisionRuleMass(std::move(m));
}

double loss(const ActionVector& a, const PartitionLabel& v, double b) {
  if (a.size() != v.size()) throw DimensionError("loss: action and label lengths differ");
  double false_rejections = 0.0;
  double false_acceptances = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !v[i]) false_rejections += 1.0;
    if (!a[i] && v[i]) false_acceptances += 1.0;
  }
  return false_rejections + b * false_acceptances;
}

PartitionLabel classify_partition(std::span<const double> mu, Variant variant) {
  PartitionLabel v(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (variant == Variant::PointNull && mu[i] < 0.0)
      throw DomainError("point-null model requires mu_i >= 0");
    v.set(i, mu[i] > 0.0);
  }
  return v;
}

std::vector<ActionVector> enumerate_actions(std::size_t k) {
  if (k > kMaxEnumerationDim) throw CapacityError("enumerate_actions: k exceeds 20");
  const std::uint64_t n = std::uint64_t{1} << k;
  std::vector<ActionVector> out;
  out.reserve(n);
  for (std::uint64_t m = 0; m < n; ++m) out.push_back(ActionVector::from_mask(m, k));
  return out;
}

std::vector<PartitionLabel> labels_with_count(std::size_t k, std::size_t r) {
  if (k > kMaxEnumerationDim) throw CapacityError("labels_with_count: k exceeds 20");
  std::vector<PartitionLabel> out;
  const std::uint64_t n = std::uint64_t{1} << k;
  for (std::uint64_t m = 0; m < n; ++m)
    if (static_cast<std::size_t>(std::popcount(m)) == r) out.push_back(PartitionLabel::from_mask(m, k));
  return out;
}

std::vector<double> induced_tests(const DecisionRuleMass& delta) {
  std::vector<double> psi(delta.k(), 0.0);
  for (const auto& [a, w] : delta.mass())
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i]) psi[i] += w;
  for (auto& p : psi) p = std::min(1.0, std::max(0.0, p));
  return psi;
}

}  // namespace mcdt
