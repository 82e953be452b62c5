#pragma once

// Exchangeable (intraclass) multivariate normal model: closed-form precision
// and determinant, log density, deterministic chunked sampling, and the
// scalar standard normal CDF / quantile used for every critical constant.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mcdt/model.hpp"

namespace mcdt {

inline constexpr std::uint64_t kDefaultSeed = 20050101;

double std_normal_pdf(double x);

/// Phi(x), absolute error below 1e-12 (erfc based).
double std_normal_cdf(double x);

/// 1 - Phi(x) without cancellation for large x.
double std_normal_sf(double x);

/// Phi^{-1}(p) for p in (0, 1): Wichura's AS241 rational approximation
/// followed by one Newton step. Throws DomainError outside (0, 1).
double std_normal_quantile(double p);

/// sigma^2 ((1 - rho) I + rho 11').
class IntraclassCov {
 public:
  /// DomainError when rho is outside [-1/(k-1), 1] or sigma2 <= 0;
  /// SingularityError on the boundary itself.
  IntraclassCov(std::size_t k, double sigma2, double rho);
  static IntraclassCov from(const ProblemSpec& spec) { return {spec.k, spec.sigma2, spec.rho}; }

  std::size_t k() const noexcept { return k_; }
  double sigma2() const noexcept { return sigma2_; }
  double rho() const noexcept { return rho_; }

  /// rho / (1 + (k-1) rho), so that Sigma^{-1} = (I - G 11') / (sigma2 (1 - rho)).
  double G() const noexcept { return g_; }

  /// (k-1) log(sigma2 (1-rho)) + log(sigma2 (1 + (k-1) rho)).
  double log_det() const noexcept { return log_det_; }

  Eigen::MatrixXd dense() const;

  /// out = Sigma x
  void apply(std::span<const double> x, std::span<double> out) const;
  /// out = Sigma^{-1} x
  void apply_precision(std::span<const double> x, std::span<double> out) const;
  /// x' Sigma^{-1} x
  double precision_quad_form(std::span<const double> x) const;

 private:
  std::size_t k_;
  double sigma2_;
  double rho_;
  double g_ = 0.0;
  double log_det_ = 0.0;
};

/// (I - G J) / (sigma2 (1 - rho)).
Eigen::MatrixXd precision_matrix(const IntraclassCov& cov);

double log_density(std::span<const double> z, std::span<const double> mu, const IntraclassCov& cov);

/// Replication count, seed and worker count for Monte Carlo estimators.
/// Results never depend on `threads`.
struct McConfig {
  std::size_t reps = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// n x k draws, row-major.
class DrawSet {
 public:
  DrawSet() = default;
  DrawSet(std::size_t n, std::size_t k) : n_(n), k_(k), data_(n * k, 0.0) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * k_, k_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * k_, k_}; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  friend bool operator==(const DrawSet&, const DrawSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> data_;
};

/// One-factor construction needs rho >= 0; Cholesky works for any valid rho.
enum class SamplingPath { Auto, OneFactor, Cholesky };

/// Rows per random substream. Chunk c of a run seeded with s always uses the
/// substream keyed by (s, c).
inline constexpr std::size_t kChunkRows = 8192;

/// n i.i.d. draws of N(mu, Sigma). Auto uses
/// Z_i = mu_i + sigma (sqrt(rho) W + sqrt(1-rho) e_i) when rho >= 0 and a
/// Cholesky factor otherwise.
DrawSet sample_mvn(const IntraclassCov& cov, std::span<const double> mu, std::size_t n,
                   std::uint64_t seed, unsigned threads = 0, SamplingPath path = SamplingPath::Auto);

}  // namespace mcdt
