#include "mcdt/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "mcdt/error.hpp"

namespace mcdt {

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace {

template <std::size_t N>
double horner(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// AS241 (PPND16), lower-tail quantile for p <= 0.5.
double ppnd16_lower(double p) {
  static constexpr double a[] = {3.387132872796366608,   133.14166789178437745, 1971.5909503065514427,
                                 13731.693765509461125,  45921.953931549871457, 67265.770927008700853,
                                 33430.575583588128105,  2509.0809287301226727};
  static constexpr double b[] = {1.0,                   42.313330701600911252, 687.1870074920579083,
                                 5394.1960214247511077,  21213.794301586595867, 39307.89580009271061,
                                 28729.085735721942674,  5226.495278852545925};
  static constexpr double c[] = {1.42343711074968357734, 4.6303378461565452959,  5.7694972214606914055,
                                 3.64784832476320460504, 1.27045825245236838258, 0.24178072517745061177,
                                 0.0227238449892691845833, 7.7454501427834140764e-4};
  static constexpr double d[] = {1.0,                    2.05319162663775882187, 1.6763848301838038494,
                                 0.68976733498510000455, 0.14810397642748007459, 0.0151986665636164571966,
                                 5.475938084995344946e-4, 1.05075007164441684324e-9};
  static constexpr double e[] = {6.6579046435011037772,  5.4637849111641143699,   1.7848265399172913358,
                                 0.29656057182850489123, 0.026532189526576123093, 0.0012426609473880784386,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,                     0.59983220655588793769,  0.13692988092273580531,
                                 0.0148753612908506148525, 7.868691311456132591e-4, 1.8463183175100546818e-5,
                                 1.4215117583164458887e-7, 2.04426310338993978564e-15};
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = std::sqrt(-std::log(p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    x = horner(e, r) / horner(f, r);
  }
  return -x;
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;  // exact for p >= 0.5
  double x = ppnd16_lower(tail);
  const double dens = std_normal_pdf(x);
  if (dens > 0.0) x -= (std_normal_cdf(x) - tail) / dens;
  return upper ? -x : x;
}

IntraclassCov::IntraclassCov(std::size_t k, double sigma2, double rho) : k_(k), sigma2_(sigma2), rho_(rho) {
  if (k == 0) throw DomainError("IntraclassCov: k must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("IntraclassCov: sigma2 must be positive");
  if (!std::isfinite(rho)) throw DomainError("IntraclassCov: rho must be finite");
  if (k >= 2) {
    const double lower = -1.0 / static_cast<double>(k - 1);
    if (rho == 1.0 || rho == lower) {
      std::ostringstream os;
      os << "IntraclassCov: rho=" << rho << " makes Sigma singular for k=" << k;
      throw SingularityError(os.str());
    }
    if (rho > 1.0 || rho < lower) {
      std::ostringstream os;
      os << "IntraclassCov: rho=" << rho << " outside (" << lower << ", 1)";
      throw DomainError(os.str());
    }
    g_ = rho / (1.0 + static_cast<double>(k - 1) * rho);
    log_det_ = static_cast<double>(k - 1) * std::log(sigma2 * (1.0 - rho)) +
               std::log(sigma2 * (1.0 + static_cast<double>(k - 1) * rho));
  } else {
    // k = 1: Sigma = sigma2 whatever rho is.
    g_ = rho;
    log_det_ = std::log(sigma2);
  }
}

Eigen::MatrixXd IntraclassCov::dense() const {
  const auto n = static_cast<Eigen::Index>(k_);
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(n, n, sigma2_ * rho_);
  s.diagonal().setConstant(sigma2_);
  return s;
}

void IntraclassCov::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != k_ || out.size() != k_) throw DimensionError("IntraclassCov::apply: length mismatch");
  if (k_ == 1) {
    out[0] = sigma2_ * x[0];
    return;
  }
  double total = 0.0;
  for (double v : x) total += v;
  for (std::size_t i = 0; i < k_; ++i) out[i] = sigma2_ * ((1.0 - rho_) * x[i] + rho_ * total);
}

void IntraclassCov::apply_precision(std::span<const double> x, std::span<double> out) const {
  if (x.size() != k_ || out.size() != k_) throw DimensionError("IntraclassCov::apply_precision: length mismatch");
  if (k_ == 1) {
    out[0] = x[0] / sigma2_;
    return;
  }
  double total = 0.0;
  for (double v : x) total += v;
  const double scale = 1.0 / (sigma2_ * (1.0 - rho_));
  for (std::size_t i = 0; i < k_; ++i) out[i] = scale * (x[i] - g_ * total);
}

double IntraclassCov::precision_quad_form(std::span<const double> x) const {
  if (x.size() != k_) throw DimensionError("IntraclassCov::precision_quad_form: length mismatch");
  double sum = 0.0;
  double sumsq = 0.0;
  for (double v : x) {
    sum += v;
    sumsq += v * v;
  }
  if (k_ == 1) return sumsq / sigma2_;
  return (sumsq - g_ * sum * sum) / (sigma2_ * (1.0 - rho_));
}

Eigen::MatrixXd precision_matrix(const IntraclassCov& cov) {
  const auto n = static_cast<Eigen::Index>(cov.k());
  if (cov.k() == 1) return Eigen::MatrixXd::Constant(1, 1, 1.0 / cov.sigma2());
  const double scale = 1.0 / (cov.sigma2() * (1.0 - cov.rho()));
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, -cov.G() * scale);
  p.diagonal().array() += scale;
  return p;
}

double log_density(std::span<const double> z, std::span<const double> mu, const IntraclassCov& cov) {
  if (z.size() != cov.k() || mu.size() != cov.k()) throw DimensionError("log_density: length mismatch");
  std::vector<double> diff(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) diff[i] = z[i] - mu[i];
  const double k = static_cast<double>(cov.k());
  return -0.5 * k * std::log(2.0 * std::numbers::pi) - 0.5 * cov.log_det() - 0.5 * cov.precision_quad_form(diff);
}

namespace {

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

DrawSet sample_mvn(const IntraclassCov& cov, std::span<const double> mu, std::size_t n, std::uint64_t seed,
                   unsigned threads, SamplingPath path) {
  const std::size_t k = cov.k();
  if (mu.size() != k) throw DimensionError("sample_mvn: mean length differs from k");
  if (path == SamplingPath::Auto) path = cov.rho() >= 0.0 ? SamplingPath::OneFactor : SamplingPath::Cholesky;
  if (path == SamplingPath::OneFactor && cov.rho() < 0.0)
    throw DomainError("sample_mvn: one-factor path requires rho >= 0");

  DrawSet out(n, k);
  if (n == 0) return out;

  const double sigma = std::sqrt(cov.sigma2());
  const double common = k == 1 ? 0.0 : std::sqrt(std::max(0.0, cov.rho()));
  const double own = k == 1 ? 1.0 : std::sqrt(std::max(0.0, 1.0 - cov.rho()));
  Eigen::MatrixXd chol;
  if (path == SamplingPath::Cholesky) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov.dense());
    if (llt.info() != Eigen::Success) throw SingularityError("sample_mvn: Cholesky factorization failed");
    chol = llt.matrixL();
  }

  const std::size_t n_chunks = (n + kChunkRows - 1) / kChunkRows;
  auto fill_chunk = [&](std::size_t c) {
    auto rng = chunk_engine(seed, c);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = c * kChunkRows;
    const std::size_t end = std::min(n, begin + kChunkRows);
    Eigen::VectorXd e(static_cast<Eigen::Index>(k));
    for (std::size_t r = begin; r < end; ++r) {
      auto row = out.row(r);
      if (path == SamplingPath::OneFactor) {
        const double w = normal(rng);
        for (std::size_t i = 0; i < k; ++i) row[i] = mu[i] + sigma * (common * w + own * normal(rng));
      } else {
        for (std::size_t i = 0; i < k; ++i) e[static_cast<Eigen::Index>(i)] = normal(rng);
        for (std::size_t i = 0; i < k; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j <= i; ++j)
            acc += chol(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * e[static_cast<Eigen::Index>(j)];
          row[i] = mu[i] + acc;
        }
      }
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fill_chunk(c);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < n_chunks; c += workers) fill_chunk(c);
    });
  pool.clear();
  return out;
}

}  // namespace mcdt
