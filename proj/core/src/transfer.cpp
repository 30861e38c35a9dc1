#include "anderson/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "anderson/csv.hpp"
#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"

namespace anderson {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

double Mat2::max_abs() const noexcept {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

double Mat2::norm() const noexcept {
  // sigma_max = (|z1| + |z2|) / 2 with z1 = (a + d, c - b), z2 = (a - d, b + c).
  return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
}

Mat2 transfer_step(double E, double v) noexcept { return {E - v, -1.0, 1.0, 0.0}; }

double TransferProduct::log_norm() const noexcept { return std::log(matrix.norm()) + log_scale; }

double TransferProduct::determinant_defect() const noexcept {
  return std::abs(matrix.det() * std::exp(2.0 * log_scale) - 1.0);
}

double TransferProduct::determinant_defect_normwise() const noexcept {
  const double nrm = matrix.norm();
  return std::abs(matrix.det() - std::exp(-2.0 * log_scale)) / (nrm * nrm);
}

TransferAccumulator::TransferAccumulator(double E, int renorm_exponent) noexcept
    : hi_(std::ldexp(1.0, renorm_exponent)), lo_(std::ldexp(1.0, -renorm_exponent)) {
  p_.E = E;
}

void TransferAccumulator::push(double v) noexcept {
  Mat2& m = p_.matrix;
  const double t = p_.E - v;
  const double a = t * m.a - m.c;
  const double b = t * m.b - m.d;
  m.c = m.a;
  m.d = m.b;
  m.a = a;
  m.b = b;
  ++p_.n;
  const double big = m.max_abs();
  if (big > hi_ || big < lo_) renormalize();
}

void TransferAccumulator::renormalize() noexcept {
  Mat2& m = p_.matrix;
  const double big = m.max_abs();
  if (big == 0.0 || !std::isfinite(big)) return;
  int e = 0;
  std::frexp(big, &e);  // big = f * 2^e, f in [1/2, 1)
  m.a = std::ldexp(m.a, -e);
  m.b = std::ldexp(m.b, -e);
  m.c = std::ldexp(m.c, -e);
  m.d = std::ldexp(m.d, -e);
  p_.log_scale += static_cast<double>(e) * kLn2;
  ++renorms_;
}

double TransferAccumulator::log_norm() const noexcept { return p_.log_norm(); }

TransferResult transfer_product(std::span<const double> v, double E,
                                const TransferOptions& options) {
  if (v.empty()) throw PreconditionError("transfer_product: potential must be nonempty");
  TransferAccumulator acc(E, options.renorm_exponent);
  TransferResult r;
  if (options.trace) r.log_norm_trace.reserve(v.size());
  for (double x : v) {
    acc.push(x);
    if (options.trace) r.log_norm_trace.push_back(acc.log_norm());
  }
  r.product = acc.product();
  return r;
}

namespace {

template <class Sampler>
double trial_rate(Sampler&& sample, double E, std::size_t n, RandomStream rng) {
  TransferAccumulator acc(E);
  for (std::size_t i = 0; i < n; ++i) acc.push(sample(rng));
  return acc.log_norm() / static_cast<double>(n);
}

LyapunovEstimate summarize(double E, std::span<const double> rates, std::size_t n,
                           std::uint64_t seed) {
  LyapunovEstimate est;
  est.E = E;
  est.n = n;
  est.trials = rates.size();
  est.seed = seed;
  double mean = 0.0;
  for (double r : rates) mean += r;
  mean /= static_cast<double>(rates.size());
  double ss = 0.0;
  for (double r : rates) ss += (r - mean) * (r - mean);
  const double var = ss / static_cast<double>(rates.size() - 1);
  est.gamma_hat = mean;
  est.std_err = std::sqrt(var / static_cast<double>(rates.size()));
  return est;
}

void check_lyapunov_args(std::size_t n, std::size_t trials) {
  if (n < 1000) throw PreconditionError("lyapunov_estimate: n must be >= 1000");
  if (trials < 2) throw PreconditionError("lyapunov_estimate: trials must be >= 2");
}

}  // namespace

LyapunovEstimate lyapunov_estimate(const PotentialDistribution& dist, double E, std::size_t n,
                                   std::size_t trials, std::uint64_t seed, unsigned workers) {
  check_lyapunov_args(n, trials);
  auto rates = parallel_map(trials, workers, [&](std::size_t t) {
    return trial_rate([&](RandomStream& rng) { return dist.sample(rng); }, E, n,
                      RandomStream(seed, streams::trial(streams::kPotential, t)));
  });
  return summarize(E, rates, n, seed);
}

LyapunovEstimate lyapunov_estimate(const PotentialSampler& sampler, double E, std::size_t n,
                                   std::size_t trials, std::uint64_t seed, unsigned workers) {
  check_lyapunov_args(n, trials);
  auto rates = parallel_map(trials, workers, [&](std::size_t t) {
    return trial_rate(sampler, E, n, RandomStream(seed, streams::trial(streams::kPotential, t)));
  });
  return summarize(E, rates, n, seed);
}

std::vector<LyapunovEstimate> lyapunov_estimates(const PotentialDistribution& dist,
                                                 std::span<const double> energies, std::size_t n,
                                                 std::size_t trials, std::uint64_t seed,
                                                 unsigned workers) {
  check_lyapunov_args(n, trials);
  // rates[t][e]
  auto rates = parallel_map(trials, workers, [&](std::size_t t) {
    const auto v = sample_potential(dist, n, seed, streams::trial(streams::kPotential, t));
    std::vector<double> out(energies.size());
    for (std::size_t e = 0; e < energies.size(); ++e) {
      TransferAccumulator acc(energies[e]);
      for (double x : v) acc.push(x);
      out[e] = acc.log_norm() / static_cast<double>(n);
    }
    return out;
  });
  std::vector<LyapunovEstimate> result;
  result.reserve(energies.size());
  std::vector<double> column(trials);
  for (std::size_t e = 0; e < energies.size(); ++e) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = rates[t][e];
    result.push_back(summarize(energies[e], column, n, seed));
  }
  return result;
}

std::vector<GrowthPoint> growth_profile(std::span<const double> v, double E,
                                        std::span<const std::size_t> checkpoints) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw PreconditionError("growth_profile: checkpoints must be positive and increasing");
  }
  if (!checkpoints.empty() && checkpoints.back() > v.size())
    throw IndexError("growth_profile: checkpoint beyond the potential length");
  std::vector<GrowthPoint> out;
  out.reserve(checkpoints.size());
  TransferAccumulator acc(E);
  std::size_t next = 0;
  for (std::size_t j = 0; j < v.size() && next < checkpoints.size(); ++j) {
    acc.push(v[j]);
    if (j + 1 == checkpoints[next]) {
      out.push_back({j + 1, acc.log_norm() / static_cast<double>(j + 1)});
      ++next;
    }
  }
  return out;
}

NonLyapunovScan non_lyapunov_scan(std::span<const double> v, double E, std::size_t horizon,
                                  double tau, double gamma_ref) {
  if (!(tau >= 0.0 && tau < 1.0))
    throw PreconditionError("non_lyapunov_scan: tau must satisfy 0 <= tau < 1");
  if (!(gamma_ref > 0)) throw PreconditionError("non_lyapunov_scan: gamma_ref must be > 0");
  if (horizon < 1) throw PreconditionError("non_lyapunov_scan: horizon must be >= 1");
  if (horizon > v.size()) throw IndexError("non_lyapunov_scan: horizon beyond the potential length");
  const auto start = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(horizon))));
  NonLyapunovScan r;
  r.min_rate = std::numeric_limits<double>::infinity();
  TransferAccumulator acc(E);
  for (std::size_t j = 1; j <= horizon; ++j) {
    acc.push(v[j - 1]);
    if (j >= start) {
      const double rate = acc.log_norm() / static_cast<double>(j);
      if (rate < r.min_rate) {
        r.min_rate = rate;
        r.argmin = j;
      }
    }
  }
  r.flag = r.min_rate <= tau * gamma_ref;
  return r;
}

PropAReport prop_a_check(std::span<const double> v, double E_k, std::size_t k, double gamma_k,
                         double gamma_bar, double tau, double markov_halfwidth,
                         std::size_t markov_grid) {
  if (!(gamma_k > 0) || !(gamma_bar >= gamma_k))
    throw PreconditionError("prop_a_check: need gamma_bar >= gamma_k > 0");
  if (!(tau > 0 && tau <= 1)) throw PreconditionError("prop_a_check: need 0 < tau <= 1");
  if (k < 1) throw PreconditionError("prop_a_check: k must be >= 1");
  if (!(markov_halfwidth > 0) || markov_grid < 2)
    throw PreconditionError("prop_a_check: Markov window needs a positive width and >= 2 points");
  const std::size_t n = 2 * k;
  if (v.size() < n) throw IndexError("prop_a_check: potential shorter than 2k");
  const auto prefix = v.first(n);

  PropAReport rep;
  rep.k = k;
  rep.n = n;
  rep.radius = std::exp(-2.0 * gamma_bar * static_cast<double>(k));
  rep.radius_underflow = !(rep.radius > 0) || E_k + rep.radius == E_k || E_k - rep.radius == E_k;

  const double bound_gamma = 12.0 * tau * gamma_k * static_cast<double>(k);
  const double bound_linear = 6.0 * tau * static_cast<double>(n);
  auto evaluate = [&](double E) {
    PropAEvaluation ev;
    ev.E = E;
    ev.log_norm = transfer_product(prefix, E).product.log_norm();
    ev.bound_gamma = bound_gamma;
    ev.bound_linear = bound_linear;
    ev.within_gamma = ev.log_norm <= bound_gamma;
    ev.within_linear = ev.log_norm <= bound_linear;
    return ev;
  };
  rep.evaluations.push_back(evaluate(E_k));
  if (!rep.radius_underflow) {
    rep.evaluations.push_back(evaluate(E_k - rep.radius));
    rep.evaluations.push_back(evaluate(E_k + rep.radius));
  }

  rep.markov_halfwidth = markov_halfwidth;
  rep.max_log_norm = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < markov_grid; ++i) {
    const double E = E_k - markov_halfwidth +
                     2.0 * markov_halfwidth * static_cast<double>(i) / static_cast<double>(markov_grid - 1);
    rep.max_log_norm = std::max(rep.max_log_norm, transfer_product(prefix, E).product.log_norm());
  }
  // Entries are polynomials of degree <= n; Markov: |p'| <= 2 n^2 / (b - a) max |p|.
  const double dn = static_cast<double>(n);
  rep.markov_log_derivative =
      std::log(2.0 * dn * dn / (2.0 * markov_halfwidth)) + std::log(2.0) + rep.max_log_norm;
  const double base = rep.evaluations.front().log_norm;
  const double pert = std::log(rep.radius) + rep.markov_log_derivative;
  rep.perturbation_log_bound = std::max(base, pert) + std::log1p(std::exp(-std::abs(base - pert)));
  return rep;
}

LyapunovCurve::LyapunovCurve(std::vector<LyapunovEstimate> estimates)
    : pts_(std::move(estimates)) {
  if (pts_.empty()) throw PreconditionError("LyapunovCurve: no estimates");
  std::sort(pts_.begin(), pts_.end(),
            [](const LyapunovEstimate& a, const LyapunovEstimate& b) { return a.E < b.E; });
  for (std::size_t i = 1; i < pts_.size(); ++i)
    if (!(pts_[i].E > pts_[i - 1].E))
      throw PreconditionError("LyapunovCurve: repeated energy");
}

double LyapunovCurve::operator()(double E) const noexcept {
  if (E <= pts_.front().E) return pts_.front().gamma_hat;
  if (E >= pts_.back().E) return pts_.back().gamma_hat;
  const auto it = std::upper_bound(pts_.begin(), pts_.end(), E,
                                   [](double x, const LyapunovEstimate& p) { return x < p.E; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (E - lo.E) / (hi.E - lo.E);
  return (1 - w) * lo.gamma_hat + w * hi.gamma_hat;
}

double LyapunovCurve::min_gamma() const noexcept {
  double g = pts_.front().gamma_hat;
  for (const auto& p : pts_) g = std::min(g, p.gamma_hat);
  return g;
}

void write_lyapunov_csv(std::ostream& os, std::span<const LyapunovEstimate> rows) {
  CsvWriter csv(os, {"E", "gamma_hat", "std_err", "n", "trials", "seed"});
  for (const auto& r : rows) {
    csv << r.E << r.gamma_hat << r.std_err << r.n << r.trials << r.seed;
    csv.end_row();
  }
}

}  // namespace anderson
