#include "mcdt/bayes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcdt/error.hpp"
#include "mcdt/procedures.hpp"

namespace mcdt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_atoms(const std::vector<PriorAtom>& atoms, Variant variant) {
  if (atoms.empty()) throw DomainError("prior: no atoms");
  const std::size_t k = atoms.front().mu.size();
  if (k == 0) throw DimensionError("prior: empty mean vector");
  if (k > kMaxEnumerationDim) throw CapacityError("prior: dimension exceeds enumeration limit");
  for (const auto& a : atoms) {
    if (a.mu.size() != k) throw DimensionError("prior: atoms of different dimension");
    if (!std::isfinite(a.log_weight)) throw DomainError("prior: weight must be positive and finite");
    for (double m : a.mu)
      if (!std::isfinite(m)) throw DomainError("prior: non-finite atom");
    classify_partition(a.mu, variant);
  }
}

double log_factorial(std::size_t s) { return std::lgamma(static_cast<double>(s) + 1.0); }

void require_stepwise(const CriticalValues& c, std::size_t k) {
  if (c.size() != k) throw DimensionError("prior sequence: constants length differs from k");
  if (!c.strictly_increasing()) throw DomainError("prior sequence: constants must be strictly increasing");
}

}  // namespace

DiscretePrior DiscretePrior::from_weights(std::vector<ParameterPoint> atoms, std::vector<double> weights,
                                          Variant variant) {
  if (atoms.size() != weights.size()) throw DimensionError("prior: atoms and weights differ in length");
  std::vector<PriorAtom> out;
  out.reserve(atoms.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) throw DomainError("prior: weight must be positive");
    out.push_back({std::move(atoms[j]), std::log(weights[j])});
  }
  return from_log_weights(std::move(out), variant);
}

DiscretePrior DiscretePrior::from_log_weights(std::vector<PriorAtom> atoms, Variant variant) {
  check_atoms(atoms, variant);
  std::vector<double> lw(atoms.size());
  for (std::size_t j = 0; j < atoms.size(); ++j) lw[j] = atoms[j].log_weight;
  const double total = log_sum_exp(lw);
  for (auto& a : atoms) a.log_weight -= total;

  DiscretePrior p;
  p.k_ = atoms.front().mu.size();
  p.atoms_ = std::move(atoms);
  p.variant_ = variant;
  return p;
}

double log_sum_exp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

PosteriorSummary posterior_from_log_cells(std::span<const double> log_cells, std::size_t k) {
  if (k == 0 || k > kMaxEnumerationDim) throw CapacityError("posterior: unsupported dimension");
  const std::size_t cells = std::size_t{1} << k;
  if (log_cells.size() != cells) throw DimensionError("posterior: expected 2^k cells");
  const double total = log_sum_exp(log_cells);
  if (!std::isfinite(total)) throw NumericalError("posterior: all mass underflowed");

  PosteriorSummary out;
  out.k = k;
  out.cell.resize(cells);
  out.component_null.assign(k, 0.0);
  for (std::size_t m = 0; m < cells; ++m) {
    const double q = log_cells[m] == kNegInf ? 0.0 : std::exp(log_cells[m] - total);
    out.cell[m] = q;
    for (std::size_t i = 0; i < k; ++i)
      if (((m >> i) & 1u) == 0) out.component_null[i] += q;
  }
  return out;
}

PosteriorSummary posterior(const DiscretePrior& prior, std::span<const double> z, const IntraclassCov& cov) {
  const std::size_t k = prior.k();
  if (z.size() != k || cov.k() != k) throw DimensionError("posterior: dimension mismatch");
  const std::size_t cells = std::size_t{1} << k;

  std::vector<std::vector<double>> terms(cells);
  for (const auto& a : prior.atoms()) {
    const auto v = classify_partition(a.mu, prior.variant());
    terms[v.mask()].push_back(a.log_weight + log_density(z, a.mu, cov));
  }
  std::vector<double> log_cells(cells, kNegInf);
  for (std::size_t m = 0; m < cells; ++m)
    if (!terms[m].empty()) log_cells[m] = log_sum_exp(terms[m]);
  return posterior_from_log_cells(log_cells, k);
}

ActionVector bayes_action(const PosteriorSummary& post, double b) {
  if (!(b > 0.0)) throw DomainError("bayes: b must be positive");
  const double threshold = b / (b + 1.0);
  ActionVector a(post.k);
  for (std::size_t i = 0; i < post.k; ++i) a.set(i, post.component_null[i] < threshold);
  return a;
}

ActionVector bayes_decide(const DiscretePrior& prior, std::span<const double> z, const IntraclassCov& cov, double b) {
  return bayes_action(posterior(prior, z, cov), b);
}

double posterior_expected_loss(const PosteriorSummary& post, const ActionVector& a, double b) {
  if (a.size() != post.k) throw DimensionError("posterior loss: action length differs from k");
  double total = 0.0;
  for (std::size_t m = 0; m < post.cell.size(); ++m) {
    if (post.cell[m] == 0.0) continue;
    total += post.cell[m] * loss(a, PartitionLabel::from_mask(m, post.k), b);
  }
  return total;
}

DiscretePrior single_step_bayes_prior(const CriticalValues& c, double b, const ProblemSpec& spec,
                                      double alternative_mean) {
  spec.validate();
  if (spec.rho != 0.0) throw HypothesisError("proper Bayes prior requires independent coordinates (rho = 0)");
  if (c.size() != spec.k) throw DimensionError("proper Bayes prior: constants length differs from k");
  if (!(b > 0.0)) throw DomainError("proper Bayes prior: b must be positive");
  if (!(alternative_mean > 0.0)) throw DomainError("proper Bayes prior: alternative atom must be positive");
  const std::size_t k = spec.k;
  if (k > kMaxEnumerationDim) throw CapacityError("proper Bayes prior: too many coordinates");

  const double m = alternative_mean;
  // log p_i and log(1 - p_i) from p / (1 - p) = b exp((m C_i - m^2/2) / sigma2)
  std::vector<double> log_p(k), log_q(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double log_r = std::log(b) + (m * c[i] - 0.5 * m * m) / spec.sigma2;
    const double log_one_plus_r = log_r > 0 ? log_r + std::log1p(std::exp(-log_r)) : std::log1p(std::exp(log_r));
    log_p[i] = log_r - log_one_plus_r;
    log_q[i] = -log_one_plus_r;
  }

  std::vector<PriorAtom> atoms;
  const std::size_t cells = std::size_t{1} << k;
  atoms.reserve(cells);
  for (std::size_t mask = 0; mask < cells; ++mask) {
    PriorAtom a;
    a.mu.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if ((mask >> i) & 1u) {
        a.mu[i] = m;
        a.log_weight += log_q[i];
      } else {
        a.log_weight += log_p[i];
      }
    }
    atoms.push_back(std::move(a));
  }
  return DiscretePrior::from_log_weights(std::move(atoms), spec.variant);
}

std::vector<double> stepdown_limit_log_numerators(std::span<const double> z, const PriorSequenceSpec& seq) {
  const std::size_t k = z.size();
  if (k == 0) throw DimensionError("prior sequence: empty observation");
  if (k > kMaxPermutationDim) throw CapacityError("prior sequence: k exceeds permutation limit");
  if (seq.n < 2) throw DomainError("prior sequence: n must be at least 2");
  require_stepwise(seq.c, k);
  if (seq.c.rho != 0.0 || seq.c.sigma2 != 1.0)
    throw HypothesisError("prior sequence: requires unit covariance");

  // pw[i] = n^(k+1-i) for rank i = 1..k, stored at index i-1
  std::vector<double> pw(k);
  for (std::size_t i = 0; i < k; ++i) pw[i] = std::pow(static_cast<double>(seq.n), static_cast<double>(k - i));

  const std::size_t cells = std::size_t{1} << k;
  std::vector<double> out(cells, 0.0);
  std::vector<std::size_t> idx;
  std::vector<double> exps;
  for (std::size_t mask = 1; mask < cells; ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < k; ++i)
      if ((mask >> i) & 1u) idx.push_back(i);
    const std::size_t s = idx.size();
    exps.clear();
    do {
      double e = 0.0;
      for (std::size_t r = 0; r < s; ++r) e += (z[idx[r]] - seq.c[k - 1 - r]) * pw[r];
      exps.push_back(e);
    } while (std::next_permutation(idx.begin(), idx.end()));
    out[mask] = log_sum_exp(exps) - log_factorial(s);
  }
  return out;
}

DiscretePrior stepdown_limit_prior(const PriorSequenceSpec& seq, Variant variant) {
  const std::size_t k = seq.c.size();
  if (k == 0) throw DimensionError("prior sequence: empty constants");
  if (k > kMaxPermutationDim) throw CapacityError("prior sequence: k exceeds permutation limit");
  if (seq.n < 2) throw DomainError("prior sequence: n must be at least 2");
  require_stepwise(seq.c, k);

  std::vector<double> pw(k);
  for (std::size_t i = 0; i < k; ++i) pw[i] = std::pow(static_cast<double>(seq.n), static_cast<double>(k - i));

  std::vector<PriorAtom> atoms;
  atoms.push_back({ParameterPoint(k, 0.0), 0.0});
  const std::size_t cells = std::size_t{1} << k;
  std::vector<std::size_t> idx;
  for (std::size_t mask = 1; mask < cells; ++mask) {
    idx.clear();
    for (std::size_t i = 0; i < k; ++i)
      if ((mask >> i) & 1u) idx.push_back(i);
    const std::size_t s = idx.size();
    do {
      PriorAtom a;
      a.mu.assign(k, 0.0);
      double lw = -log_factorial(s);
      for (std::size_t r = 0; r < s; ++r) {
        a.mu[idx[r]] = pw[r];
        lw += 0.5 * pw[r] * pw[r] - seq.c[k - 1 - r] * pw[r];
      }
      a.log_weight = lw;
      atoms.push_back(std::move(a));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return DiscretePrior::from_log_weights(std::move(atoms), variant);
}

std::vector<std::size_t> default_limit_schedule() {
  std::vector<std::size_t> s(39);
  std::iota(s.begin(), s.end(), std::size_t{2});
  return s;
}

ConvergenceReport bayes_limit_action(std::span<const double> z, const ProblemSpec& spec, const CriticalValues& c,
                                     const LimitOptions& opts) {
  spec.validate();
  const std::size_t k = spec.k;
  if (z.size() != k) throw DimensionError("bayes limit: observation length differs from k");
  if (spec.rho != 0.0 || spec.sigma2 != 1.0) throw HypothesisError("bayes limit: requires unit covariance");
  if (opts.stable_run == 0) throw DomainError("bayes limit: stable run must be positive");
  require_stepwise(c, k);

  const auto schedule = opts.schedule.empty() ? default_limit_schedule() : opts.schedule;
  ConvergenceReport rep;
  rep.step_down_action = step_down_decide(z, c);

  std::vector<double> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) rep.min_margin = std::min(rep.min_margin, std::abs(sorted[i] - c[k - 1 - i]));

  const std::size_t sd_mask = rep.step_down_action.mask();
  std::vector<double> sd_post;
  for (std::size_t n : schedule) {
    const auto logs = stepdown_limit_log_numerators(z, {n, c});
    const auto post = posterior_from_log_cells(logs, k);
    ConvergenceRow row;
    row.n = n;
    row.action = bayes_action(post, opts.b);
    row.winning_posterior = post.cell[row.action.mask()];
    row.matches_step_down = row.action == rep.step_down_action;
    rep.rows.push_back(row);
    sd_post.push_back(post.cell[sd_mask]);
  }

  // trailing run of identical actions
  std::size_t run = 0;
  if (!rep.rows.empty()) {
    run = 1;
    for (std::size_t j = rep.rows.size() - 1; j > 0 && rep.rows[j - 1].action == rep.rows.back().action; --j) ++run;
  }
  if (run >= opts.stable_run) {
    rep.limit_action = rep.rows.back().action;
    rep.stabilized_at = rep.rows[rep.rows.size() - run].n;
    rep.matches_step_down = *rep.limit_action == rep.step_down_action;
    rep.eventually_monotone = true;
    for (std::size_t j = rep.rows.size() - run + 1; j < rep.rows.size(); ++j)
      if (sd_post[j] < sd_post[j - 1]) rep.eventually_monotone = false;
  }

  if (rep.min_margin <= opts.boundary_margin) {
    rep.inconclusive = true;
    rep.reason = "observation within boundary margin of a step-down comparison";
  } else if (!rep.limit_action) {
    rep.inconclusive = true;
    rep.reason = "action did not stabilize within the schedule";
  }
  return rep;
}

}  // namespace mcdt
