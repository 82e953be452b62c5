#pragma once

// Decision-theoretic vocabulary for the one-sided multiple endpoints problem:
// problems, parameter cells, actions, the additive loss, and the map from
// randomized rules to per-hypothesis test functions.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mcdt {

/// Point nulls H_i: mu_i = 0 on mu >= 0, or composite nulls H_i*: mu_i <= 0.
enum class Variant { PointNull, CompositeNull };

std::string_view to_string(Variant v);

struct ProblemSpec {
  std::size_t k = 1;
  double sigma2 = 1.0;
  double rho = 0.0;
  double b = 1.0;      ///< loss for a false acceptance (false rejection costs 1)
  double alpha = 0.05;
  Variant variant = Variant::PointNull;

  /// Throws DomainError unless k >= 1, sigma2 > 0, b > 0, 0 < alpha < 1 and
  /// -1/(k-1) < rho < 1 (for k >= 2).
  void validate() const;
};

/// Fixed-length 0/1 vector. The tag keeps actions and partition labels
/// apart even though they share one representation.
template <class Tag>
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t k) : bits_(k, 0) {}
  BitVector(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) bits_.push_back(b != 0 ? 1 : 0);
  }
  explicit BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b != 0 ? 1 : 0;
  }

  /// Bit i of `mask` becomes entry i.
  static BitVector from_mask(std::uint64_t mask, std::size_t k) {
    BitVector out(k);
    for (std::size_t i = 0; i < k; ++i) out.bits_[i] = (mask >> i) & 1u;
    return out;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  /// Inverse of from_mask; only meaningful for size() <= 64.
  std::uint64_t mask() const noexcept {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size() && i < 64; ++i)
      m |= static_cast<std::uint64_t>(bits_[i]) << i;
    return m;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  /// "(1,0,1)"
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (i) s += ',';
      s += bits_[i] ? '1' : '0';
    }
    s += ')';
    return s;
  }

  friend auto operator<=>(const BitVector&, const BitVector&) = default;
  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ActionTag {};
struct PartitionTag {};

/// a_i = 1 rejects H_i.
using ActionVector = BitVector<ActionTag>;
/// v_i = 1 places mu_i in the alternative.
using PartitionLabel = BitVector<PartitionTag>;

/// Mean vector mu. Under PointNull every entry must be >= 0.
using ParameterPoint = std::vector<double>;

inline PartitionLabel as_label(const ActionVector& a) {
  return PartitionLabel(std::vector<std::uint8_t>(a.bits().begin(), a.bits().end()));
}
inline ActionVector as_action(const PartitionLabel& v) {
  return ActionVector(std::vector<std::uint8_t>(v.bits().begin(), v.bits().end()));
}

/// Probability mass function over the action set for one observation.
class DecisionRuleMass {
 public:
  /// Throws DomainError for negative weights, weights not summing to 1
  /// (within 1e-12) or an empty map; DimensionError for mixed lengths.
  explicit DecisionRuleMass(std::map<ActionVector, double> mass);

  static DecisionRuleMass point_mass(const ActionVector& a);
  static DecisionRuleMass uniform(std::size_t k);

  std::size_t k() const noexcept { return k_; }
  const std::map<ActionVector, double>& mass() const noexcept { return mass_; }

 private:
  std::map<ActionVector, double> mass_;
  std::size_t k_ = 0;
};

/// sum_i a_i (1 - v_i) + b sum_i (1 - a_i) v_i.
double loss(const ActionVector& a, const PartitionLabel& v, double b);

/// v_i = 1 iff mu_i > 0. PointNull rejects negative entries with DomainError.
PartitionLabel classify_partition(std::span<const double> mu, Variant variant);

inline constexpr std::size_t kMaxEnumerationDim = 20;

/// All 2^k actions in binary-counting order (entry i is bit i of the index).
/// Throws CapacityError for k > 20.
std::vector<ActionVector> enumerate_actions(std::size_t k);

/// Labels with exactly r ones, in binary-counting order.
std::vector<PartitionLabel> labels_with_count(std::size_t k, std::size_t r);

/// psi_i = sum_a a_i delta(a).
std::vector<double> induced_tests(const DecisionRuleMass& delta);

}  // namespace mcdt
