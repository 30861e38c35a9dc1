#pragma once

// Sets of energies approximated by eigenvalues: truncated limsup sets, the
// neighbourhoods of dyadic block spectra, the covering function, and the
// measure dichotomy experiment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anderson/interval.hpp"
#include "anderson/interval_union.hpp"
#include "anderson/potential.hpp"

namespace anderson {

enum class ApproxKind { exponential, power, harmonic, table };

/// A positive non-increasing sequence alpha_k, k >= 1, tending to zero.
class ApproxSequence {
public:
  /// alpha_k = exp(-2 gamma_bar k), gamma_bar > 0.
  static ApproxSequence exponential(double gamma_bar);
  /// alpha_k = c k^-p, c > 0, p > 0.
  static ApproxSequence power(double c, double p);
  /// alpha_k = c / k, c > 0.
  static ApproxSequence harmonic(double c);
  /// alpha_k = values[k - 1]; values positive and non-increasing. Indices
  /// beyond the table raise IndexError.
  static ApproxSequence table(std::vector<double> values);

  ApproxKind kind() const noexcept { return kind_; }
  bool clamped() const noexcept { return clamped_; }
  double gamma_bar() const noexcept { return gamma_bar_; }
  double c() const noexcept { return c_; }
  double p() const noexcept { return p_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(std::size_t k) const;
  /// log alpha_k, exact where alpha_k itself underflows.
  double log_value(std::size_t k) const;
  /// sum_{k=K1}^{K2} alpha_k, compensated.
  double partial_sum(std::size_t K1, std::size_t K2) const;
  /// Whether sum alpha_k diverges (analytic for closed forms; a table is finite).
  bool sum_diverges() const noexcept;

  ApproxSequence with_clamp() const {
    ApproxSequence s = *this;
    s.clamped_ = true;
    return s;
  }

private:
  ApproxSequence() = default;
  ApproxKind kind_ = ApproxKind::harmonic;
  double gamma_bar_ = 0.0, c_ = 1.0, p_ = 1.0;
  std::vector<double> values_;
  bool clamped_ = false;
};

/// alpha_k -> min(alpha_k, 1/k).
ApproxSequence clamp_sequence(const ApproxSequence& alpha);

/// union_{K1 <= k <= K2} (E_k - alpha_k, E_k + alpha_k) clipped to I, where
/// E_list[k - 1] = E_k in center order.
IntervalUnion truncated_approx_set(std::span<const double> E_list, const ApproxSequence& alpha,
                                   std::size_t K1, std::size_t K2, Interval I);

/// Half-width 1/2 alpha_{2 4^m} neighbourhood of a dyadic block spectrum,
/// clipped to I. Needs alpha_{2 4^m} <= 1 / (2 4^m).
IntervalUnion delta_set(std::span<const double> block_spectrum, Interval I,
                        const ApproxSequence& alpha, unsigned m);

struct BPrimeLevel {
  unsigned m = 0;
  double half_width = 0.0;  // 1/2 alpha_{2 4^m}
  IntervalUnion delta;
  IntervalUnion bprime;     // I minus the union of delta over m' in [m, M]
  double delta_measure = 0.0;
  double bprime_measure = 0.0;
};

struct Claim2Stat {
  unsigned m = 0;
  double new_mass = 0.0;  // mes(B'_{m+1} \ B'_m)
  double ratio = 0.0;     // new_mass / (mes I 4^m alpha_{2 4^m})
  bool event = false;     // mes B'_{m+1} >= (1 - zeta) mes I and ratio <= zeta
};

struct BPrimeChain {
  unsigned m0 = 0;
  unsigned M = 0;  // last computed level; "for all m' >= m" is truncated here
  Interval I;
  double zeta = 0.0;
  std::vector<BPrimeLevel> levels;  // m0 .. M
  std::vector<Claim2Stat> claim2;   // m0 .. M-1
};

/// spectra[i] is sigma(H_{m0 + i}). Needs at least two levels.
BPrimeChain bprime_chain(std::span<const std::vector<double>> spectra, unsigned m0, Interval I,
                         const ApproxSequence& alpha, double zeta = 0.05);

/// Same with explicit half-widths per level (a zero half-width gives an
/// empty neighbourhood).
BPrimeChain bprime_chain(std::span<const std::vector<double>> spectra, unsigned m0, Interval I,
                         std::span<const double> half_widths, std::span<const double> alpha_2x4m,
                         double zeta = 0.05);

struct CoveringResult {
  IntervalUnion A;          // {E in I : mes((E - theta, E + theta) cap B) <= theta}
  double measure = 0.0;
  double bound = 0.0;       // 4 (mes(I \ B) + theta)
  bool holds = false;       // measure <= bound
};

/// Exact sublevel set of the window-measure function by a sweep over its
/// breakpoints. Needs theta > 0 and B inside I.
CoveringResult covering_function(const IntervalUnion& B, Interval I, double theta);

struct KhinchinCheckpoint {
  std::size_t K = 0;
  double covered = 0.0;      // mes union_{k <= K} (E_k +- alpha_k) cap I
  double tail = 0.0;         // mes union_{K <= k <= K_max} (...)
  double tail_bound = 0.0;   // sum_{K <= k <= K_max} 2 alpha_k
};

struct DyadicNewMass {
  std::size_t k_lo = 0, k_hi = 0;  // window [k_lo, k_hi)
  double new_mass = 0.0;
};

struct LevelSums {
  unsigned m = 0;
  std::size_t block_count = 0;  // #sigma(H_m)
  std::size_t bad_count = 0;    // block eigenvalues with no bulk-rank box eigenvalue within 1/2 8^-m
  double alpha = 0.0;           // alpha_{4^m}
  double partial_all = 0.0;     // running sum of block_count * alpha
  double partial_bad = 0.0;     // running sum of bad_count * alpha
};

struct KhinchinTrial {
  std::uint64_t stream = 0;
  std::vector<KhinchinCheckpoint> checkpoints;
  std::vector<DyadicNewMass> new_mass;
  std::vector<LevelSums> levels;
  std::vector<double> E_list;  // only when requested
};

struct KhinchinReport {
  Interval I;
  std::size_t K_max = 0;
  std::size_t box_length = 0;
  bool divergent = false;
  std::uint64_t seed = 0;
  std::vector<KhinchinTrial> trials;
};

struct KhinchinOptions {
  std::size_t padding = 512;  // box length K_max + padding
  double tol = 1e-12;         // eigenvalue accuracy
  bool keep_eigenvalues = false;
  bool level_sums = true;
};

/// Center-ordered eigenvalues of H_[1, K_max + padding] per trial; measures
/// of the truncated limsup set at the checkpoints. I must lie in the
/// interior of S.
KhinchinReport khinchin_experiment(const PotentialDistribution& dist, Interval I,
                                   const ApproxSequence& alpha, std::size_t K_max,
                                   std::span<const std::size_t> checkpoints, std::size_t trials,
                                   std::uint64_t seed, const KhinchinOptions& options = {},
                                   unsigned workers = 0);

/// Same measurements for a given center-ordered eigenvalue list.
KhinchinTrial khinchin_measure(std::span<const double> E_list, Interval I,
                               const ApproxSequence& alpha,
                               std::span<const std::size_t> checkpoints);

}  // namespace anderson
