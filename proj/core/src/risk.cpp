#include "mcdt/risk.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mcdt/error.hpp"

namespace mcdt {

namespace {

struct Accumulator {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t n = 0;

  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }

  RiskEstimate finish(std::uint64_t seed) const {
    RiskEstimate r;
    r.n_reps = n;
    r.seed = seed;
    if (n == 0) return r;
    r.mean = sum / static_cast<double>(n);
    if (n > 1) {
      const double var = std::max(0.0, (sumsq - static_cast<double>(n) * r.mean * r.mean) / static_cast<double>(n - 1));
      r.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return r;
  }
};

DrawSet draws_at(std::span<const double> mu, const ProblemSpec& spec, const McConfig& mc) {
  spec.validate();
  if (mu.size() != spec.k) throw DimensionError("risk: mean length differs from k");
  return sample_mvn(IntraclassCov::from(spec), mu, mc.reps, mc.seed, mc.threads);
}

double label_loss(std::span<const double> psi, const PartitionLabel& v, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) total += v[i] ? b * (1.0 - psi[i]) : psi[i];
  return total;
}

}  // namespace

double binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  double out = 1.0;
  for (std::size_t i = 1; i <= r; ++i) out = out * static_cast<double>(n - r + i) / static_cast<double>(i);
  return std::round(out);
}

ActionHistogram::ActionHistogram(const DecisionMap& proc, const DrawSet& draws) : k_(draws.k()), n_(draws.n()) {
  if (k_ > kMaxEnumerationDim) throw CapacityError("ActionHistogram: k exceeds 20");
  counts_.assign(std::size_t{1} << k_, 0);
  for (std::size_t r = 0; r < n_; ++r) {
    const ActionVector a = proc(draws.row(r));
    if (a.size() != k_) throw DimensionError("ActionHistogram: procedure returned wrong length");
    ++counts_[a.mask()];
  }
}

RiskEstimate ActionHistogram::risk_for(const PartitionLabel& v, double b, std::uint64_t seed) const {
  if (v.size() != k_) throw DimensionError("ActionHistogram::risk_for: label length differs from k");
  // Group sums reproduce the per-draw accumulation exactly up to rounding.
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t m = 0; m < counts_.size(); ++m) {
    if (counts_[m] == 0) continue;
    const double l = loss(ActionVector::from_mask(m, k_), v, b);
    const double c = static_cast<double>(counts_[m]);
    sum += c * l;
    sumsq += c * l * l;
  }
  Accumulator acc{sum, sumsq, n_};
  return acc.finish(seed);
}

RiskEstimate ActionHistogram::rejection_rate(std::size_t i, std::uint64_t seed) const {
  if (i >= k_) throw DimensionError("ActionHistogram::rejection_rate: index out of range");
  double hits = 0.0;
  for (std::size_t m = 0; m < counts_.size(); ++m)
    if ((m >> i) & 1u) hits += static_cast<double>(counts_[m]);
  Accumulator acc{hits, hits, n_};
  return acc.finish(seed);
}

double ActionHistogram::expected_rejections() const {
  double total = 0.0;
  for (std::size_t m = 0; m < counts_.size(); ++m)
    total += static_cast<double>(counts_[m]) * static_cast<double>(std::popcount(m));
  return n_ == 0 ? 0.0 : total / static_cast<double>(n_);
}

RiskEstimate risk_scalar(const DecisionMap& proc, std::span<const double> mu, const ProblemSpec& spec,
                         const McConfig& mc) {
  const PartitionLabel v = classify_partition(mu, spec.variant);
  const DrawSet draws = draws_at(mu, spec, mc);
  return ActionHistogram(proc, draws).risk_for(v, spec.b, mc.seed);
}

RiskEstimate risk_scalar(const TestFunction& psi, std::span<const double> mu, const ProblemSpec& spec,
                         const McConfig& mc) {
  const PartitionLabel v = classify_partition(mu, spec.variant);
  const DrawSet draws = draws_at(mu, spec, mc);
  Accumulator acc;
  for (std::size_t r = 0; r < draws.n(); ++r) {
    const std::vector<double> p = psi(draws.row(r));
    if (p.size() != spec.k) throw DimensionError("risk_scalar: test function returned wrong length");
    acc.add(label_loss(p, v, spec.b));
  }
  return acc.finish(mc.seed);
}

std::vector<RiskEstimate> risk_vector(const DecisionMap& proc, std::span<const double> mu, const ProblemSpec& spec,
                                      const McConfig& mc) {
  const PartitionLabel v = classify_partition(mu, spec.variant);
  const DrawSet draws = draws_at(mu, spec, mc);
  const ActionHistogram hist(proc, draws);
  std::vector<RiskEstimate> out(spec.k);
  for (std::size_t i = 0; i < spec.k; ++i) {
    RiskEstimate rate = hist.rejection_rate(i, mc.seed);
    if (v[i]) {
      rate.mean = spec.b * (1.0 - rate.mean);
      rate.std_error *= spec.b;
    }
    out[i] = rate;
  }
  return out;
}

OriginRiskTable origin_risk_table(const DecisionMap& proc, const ProblemSpec& spec, const McConfig& mc) {
  const std::vector<double> zero(spec.k, 0.0);
  const DrawSet draws = draws_at(zero, spec, mc);
  const ActionHistogram hist(proc, draws);
  OriginRiskTable table;
  table.k = spec.k;
  table.b = spec.b;
  const std::size_t n_labels = std::size_t{1} << spec.k;
  table.by_label.reserve(n_labels);
  for (std::size_t m = 0; m < n_labels; ++m)
    table.by_label.push_back(hist.risk_for(PartitionLabel::from_mask(m, spec.k), spec.b, mc.seed));
  table.expected_rejections = hist.expected_rejections();
  return table;
}

AggregateIdentity gamma_r_aggregate(const OriginRiskTable& table, std::size_t r) {
  const std::size_t k = table.k;
  if (r < 1 || r + 1 > k) throw DomainError("gamma_r_aggregate: r must satisfy 1 <= r <= k-1");
  AggregateIdentity out;
  for (const auto& v : labels_with_count(k, r)) out.lhs += table.at(v).mean;
  const double b = table.b;
  out.rhs = b * static_cast<double>(k) * binomial(k - 1, r - 1) +
            (binomial(k - 1, r) - b * binomial(k - 1, k - r)) * table.expected_rejections;
  return out;
}

AggregateIdentity gamma_r_aggregate(const DecisionMap& proc, std::size_t r, const ProblemSpec& spec,
                                    const McConfig& mc) {
  return gamma_r_aggregate(origin_risk_table(proc, spec, mc), r);
}

RiskEstimate rule_mass_risk(const RandomizedRule& delta, std::span<const double> mu, const ProblemSpec& spec,
                            const McConfig& mc) {
  const PartitionLabel v = classify_partition(mu, spec.variant);
  const DrawSet draws = draws_at(mu, spec, mc);
  Accumulator acc;
  for (std::size_t r = 0; r < draws.n(); ++r) {
    const DecisionRuleMass d = delta(draws.row(r));
    if (d.k() != spec.k) throw DimensionError("rule_mass_risk: rule returned wrong length");
    double expected = 0.0;
    for (const auto& [a, w] : d.mass()) expected += w * loss(a, v, spec.b);
    acc.add(expected);
  }
  return acc.finish(mc.seed);
}

}  // namespace mcdt
