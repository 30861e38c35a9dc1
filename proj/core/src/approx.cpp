#include "anderson/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anderson/errors.hpp"
#include "anderson/localization.hpp"
#include "anderson/parallel.hpp"
#include "anderson/tridiagonal.hpp"

namespace anderson {

ApproxSequence ApproxSequence::exponential(double gamma_bar) {
  if (!(gamma_bar > 0) || !std::isfinite(gamma_bar))
    throw PreconditionError("alpha: exponential rate gamma_bar must be > 0");
  ApproxSequence s;
  s.kind_ = ApproxKind::exponential;
  s.gamma_bar_ = gamma_bar;
  return s;
}

ApproxSequence ApproxSequence::power(double c, double p) {
  if (!(c > 0) || !(p > 0) || !std::isfinite(c) || !std::isfinite(p))
    throw PreconditionError("alpha: power sequence needs c > 0 and p > 0");
  ApproxSequence s;
  s.kind_ = ApproxKind::power;
  s.c_ = c;
  s.p_ = p;
  return s;
}

ApproxSequence ApproxSequence::harmonic(double c) {
  if (!(c > 0) || !std::isfinite(c)) throw PreconditionError("alpha: harmonic sequence needs c > 0");
  ApproxSequence s;
  s.kind_ = ApproxKind::harmonic;
  s.c_ = c;
  return s;
}

ApproxSequence ApproxSequence::table(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("alpha: table must be nonempty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i]))
      throw PreconditionError("alpha: table entries must be positive");
    if (i > 0 && values[i] > values[i - 1])
      throw PreconditionError("alpha: table must be non-increasing");
  }
  ApproxSequence s;
  s.kind_ = ApproxKind::table;
  s.values_ = std::move(values);
  return s;
}

double ApproxSequence::operator()(std::size_t k) const {
  if (k == 0) throw IndexError("alpha: indices start at 1");
  const double dk = static_cast<double>(k);
  double a = 0.0;
  switch (kind_) {
    case ApproxKind::exponential: a = std::exp(-2.0 * gamma_bar_ * dk); break;
    case ApproxKind::power: a = c_ * std::pow(dk, -p_); break;
    case ApproxKind::harmonic: a = c_ / dk; break;
    case ApproxKind::table:
      if (k > values_.size())
        throw IndexError("alpha: index " + std::to_string(k) + " beyond the table");
      a = values_[k - 1];
      break;
  }
  return clamped_ ? std::min(a, 1.0 / dk) : a;
}

double ApproxSequence::log_value(std::size_t k) const {
  if (k == 0) throw IndexError("alpha: indices start at 1");
  const double dk = static_cast<double>(k);
  double la = 0.0;
  switch (kind_) {
    case ApproxKind::exponential: la = -2.0 * gamma_bar_ * dk; break;
    case ApproxKind::power: la = std::log(c_) - p_ * std::log(dk); break;
    case ApproxKind::harmonic: la = std::log(c_) - std::log(dk); break;
    case ApproxKind::table: return std::log((*this)(k));
  }
  return clamped_ ? std::min(la, -std::log(dk)) : la;
}

double ApproxSequence::partial_sum(std::size_t K1, std::size_t K2) const {
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = K1; k <= K2; ++k) {
    const double x = (*this)(k);
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

bool ApproxSequence::sum_diverges() const noexcept {
  switch (kind_) {
    case ApproxKind::harmonic: return true;
    case ApproxKind::power: return p_ <= 1.0;
    case ApproxKind::exponential:
    case ApproxKind::table: return false;
  }
  return false;
}

ApproxSequence clamp_sequence(const ApproxSequence& alpha) { return alpha.with_clamp(); }

IntervalUnion truncated_approx_set(std::span<const double> E_list, const ApproxSequence& alpha,
                                   std::size_t K1, std::size_t K2, Interval I) {
  if (K1 < 1 || K2 < K1) throw PreconditionError("truncated_approx_set: empty index range");
  if (K2 > E_list.size())
    throw IndexError("truncated_approx_set: K2 exceeds the number of available centers");
  std::vector<Interval> pieces;
  pieces.reserve(K2 - K1 + 1);
  for (std::size_t k = K1; k <= K2; ++k) {
    const double a = alpha(k);
    const double lo = std::max(E_list[k - 1] - a, I.lo);
    const double hi = std::min(E_list[k - 1] + a, I.hi);
    if (lo < hi) pieces.push_back({lo, hi});
  }
  return IntervalUnion(std::move(pieces));
}

IntervalUnion delta_set(std::span<const double> block_spectrum, Interval I,
                        const ApproxSequence& alpha, unsigned m) {
  const std::size_t k = std::size_t{2} << (2 * m);
  const double a = alpha(k);
  if (a > (1.0 + 1e-12) / static_cast<double>(k))
    throw PreconditionError("delta_set: alpha must satisfy alpha_k <= 1/k (clamp it first)");
  if (!(a > 0)) return {};
  return union_of_intervals(block_spectrum, 0.5 * a, I);
}

BPrimeChain bprime_chain(std::span<const std::vector<double>> spectra, unsigned m0, Interval I,
                         std::span<const double> half_widths, std::span<const double> alpha_2x4m,
                         double zeta) {
  if (spectra.size() < 2) throw PreconditionError("bprime_chain: needs at least two levels");
  if (half_widths.size() != spectra.size() || alpha_2x4m.size() != spectra.size())
    throw PreconditionError("bprime_chain: one half-width and alpha per level");
  if (!(I.length() > 0)) throw PreconditionError("bprime_chain: I must have positive length");
  const std::size_t n = spectra.size();
  BPrimeChain ch;
  ch.m0 = m0;
  ch.M = m0 + static_cast<unsigned>(n) - 1;
  ch.I = I;
  ch.zeta = zeta;
  ch.levels.resize(n);
  const IntervalUnion whole = IntervalUnion::single(I);
  IntervalUnion covered;
  for (std::size_t i = n; i-- > 0;) {
    BPrimeLevel& lv = ch.levels[i];
    lv.m = m0 + static_cast<unsigned>(i);
    lv.half_width = half_widths[i];
    if (half_widths[i] > 0) lv.delta = union_of_intervals(spectra[i], half_widths[i], I);
    covered = covered.unite(lv.delta);
    lv.bprime = whole.subtract(covered);
    lv.delta_measure = lv.delta.measure();
    lv.bprime_measure = lv.bprime.measure();
  }
  const double mesI = I.length();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Claim2Stat st;
    st.m = ch.levels[i].m;
    st.new_mass = ch.levels[i + 1].bprime.subtract(ch.levels[i].bprime).measure();
    const double denom = mesI * std::ldexp(1.0, 2 * static_cast<int>(st.m)) * alpha_2x4m[i];
    st.ratio = denom > 0 ? st.new_mass / denom
                         : (st.new_mass > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    st.event = ch.levels[i + 1].bprime_measure >= (1.0 - zeta) * mesI && st.ratio <= zeta;
    ch.claim2.push_back(st);
  }
  return ch;
}

BPrimeChain bprime_chain(std::span<const std::vector<double>> spectra, unsigned m0, Interval I,
                         const ApproxSequence& alpha, double zeta) {
  std::vector<double> hw(spectra.size()), a2(spectra.size());
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    const unsigned m = m0 + static_cast<unsigned>(i);
    const std::size_t k = std::size_t{2} << (2 * m);
    a2[i] = alpha(k);
    if (a2[i] > (1.0 + 1e-12) / static_cast<double>(k))
      throw PreconditionError("bprime_chain: alpha must satisfy alpha_k <= 1/k (clamp it first)");
    hw[i] = 0.5 * a2[i];
  }
  return bprime_chain(spectra, m0, I, hw, a2, zeta);
}

CoveringResult covering_function(const IntervalUnion& B, Interval I, double theta) {
  if (!(theta > 0)) throw PreconditionError("covering_function: theta must be > 0");
  for (const auto& b : B.intervals())
    if (b.lo < I.lo || b.hi > I.hi)
      throw PreconditionError("covering_function: B must lie inside I");

  std::vector<double> xs{I.lo, I.hi};
  for (const auto& b : B.intervals())
    for (double x : {b.lo - theta, b.lo + theta, b.hi - theta, b.hi + theta})
      if (x > I.lo && x < I.hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Interval> pieces;
  double f0 = B.window_measure(xs[0], theta);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double x0 = xs[i], x1 = xs[i + 1];
    const double f1 = B.window_measure(x1, theta);
    const bool in0 = f0 <= theta, in1 = f1 <= theta;
    if (in0 && in1) {
      pieces.push_back({x0, x1});
    } else if (in0) {
      pieces.push_back({x0, x0 + (theta - f0) / (f1 - f0) * (x1 - x0)});
    } else if (in1) {
      pieces.push_back({x1 - (theta - f1) / (f0 - f1) * (x1 - x0), x1});
    }
    f0 = f1;
  }
  CoveringResult r;
  r.A = IntervalUnion(std::move(pieces));
  r.measure = r.A.measure();
  r.bound = 4.0 * (IntervalUnion::single(I).subtract(B).measure() + theta);
  r.holds = r.measure <= r.bound;
  return r;
}

KhinchinTrial khinchin_measure(std::span<const double> E_list, Interval I,
                               const ApproxSequence& alpha,
                               std::span<const std::size_t> checkpoints) {
  const std::size_t K_max = E_list.size();
  if (K_max == 0) throw PreconditionError("khinchin: empty eigenvalue list");
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] < 1 || checkpoints[i] > K_max || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw PreconditionError("khinchin: checkpoints must be increasing within [1, K_max]");
  KhinchinTrial tr;
  for (std::size_t K : checkpoints) {
    KhinchinCheckpoint cp;
    cp.K = K;
    cp.covered = truncated_approx_set(E_list, alpha, 1, K, I).measure();
    cp.tail = truncated_approx_set(E_list, alpha, K, K_max, I).measure();
    cp.tail_bound = 2.0 * alpha.partial_sum(K, K_max);
    tr.checkpoints.push_back(cp);
  }
  double prev = 0.0;
  for (std::size_t lo = 1; lo <= K_max; lo *= 2) {
    const std::size_t hi = std::min(2 * lo, K_max + 1);
    const double now = truncated_approx_set(E_list, alpha, 1, hi - 1, I).measure();
    tr.new_mass.push_back({lo, hi, now - prev});
    prev = now;
  }
  return tr;
}

KhinchinReport khinchin_experiment(const PotentialDistribution& dist, Interval I,
                                   const ApproxSequence& alpha, std::size_t K_max,
                                   std::span<const std::size_t> checkpoints, std::size_t trials,
                                   std::uint64_t seed, const KhinchinOptions& options,
                                   unsigned workers) {
  if (!essential_spectrum(dist).strictly_contains(I))
    throw PreconditionError("khinchin: I must lie in the interior of S");
  if (K_max < 1 || trials < 1) throw PreconditionError("khinchin: need K_max >= 1 and trials >= 1");
  const std::size_t N = K_max + options.padding;

  KhinchinReport rep;
  rep.I = I;
  rep.K_max = K_max;
  rep.box_length = N;
  rep.divergent = alpha.sum_diverges();
  rep.seed = seed;
  rep.trials = parallel_map(trials, workers, [&](std::size_t t) {
    const std::uint64_t stream = streams::trial(streams::kPotential, t);
    const auto v = sample_potential(dist, N, seed, stream);
    std::vector<CenteredEigenvalue> centered;
    try {
      centered = center_ordered_eigenvalues(TridiagonalBlock(1, v), options.tol);
    } catch (const NumericError& e) {
      throw e.with_origin(seed, stream);
    }
    std::vector<double> E_list(K_max);
    for (std::size_t k = 0; k < K_max; ++k) E_list[k] = centered[k].E;
    KhinchinTrial tr = khinchin_measure(E_list, I, alpha, checkpoints);
    tr.stream = stream;

    if (options.level_sums) {
      double all = 0.0, bad = 0.0;
      for (unsigned m = 2; (std::size_t{2} << (2 * m)) - 1 <= N; ++m) {
        const std::size_t four_m = std::size_t{1} << (2 * m);
        const std::size_t two_m = std::size_t{1} << m;
        const auto block = eigenvalues_bisection(dyadic_block(v, m), options.tol);
        std::vector<double> bulk;
        // bulk by rank k in center order, as in block_match
        for (std::size_t k = four_m + two_m; k < 2 * four_m - two_m && k <= centered.size(); ++k)
          bulk.push_back(centered[k - 1].E);
        std::sort(bulk.begin(), bulk.end());
        const double thr = 0.5 * std::pow(8.0, -static_cast<double>(m));
        LevelSums ls;
        ls.m = m;
        ls.block_count = block.size();
        for (double e : block) {
          auto it = std::lower_bound(bulk.begin(), bulk.end(), e - thr);
          if (it == bulk.end() || *it > e + thr) ++ls.bad_count;
        }
        ls.alpha = alpha(four_m);
        all += static_cast<double>(ls.block_count) * ls.alpha;
        bad += static_cast<double>(ls.bad_count) * ls.alpha;
        ls.partial_all = all;
        ls.partial_bad = bad;
        tr.levels.push_back(ls);
      }
    }
    if (options.keep_eigenvalues) tr.E_list = std::move(E_list);
    return tr;
  });
  return rep;
}

}  // namespace anderson
