#pragma once

// Numerical checks of the localization structure of box eigenpairs:
// localization centers and their counting function, exponential decay away
// from the center, eigenvalue spacing by center order, and the matching of
// box eigenvalues with the spectra of dyadic blocks.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "anderson/tridiagonal.hpp"

namespace anderson {

struct LocalizedEigenpair {
  double E = 0.0;
  std::vector<double> psi;     // unit vector on the box
  std::size_t box_offset = 1;  // site of psi[0]
  std::size_t center = 0;      // site of max |psi|
  double decay_rate = 0.0;     // least-squares rate of log |psi| over the whole box
  double fit_quality = 0.0;    // R^2 of that fit

  double at_site(std::size_t site) const noexcept { return psi[site - box_offset]; }
};

struct CountingPoint {
  std::size_t L = 0;
  std::size_t count = 0;     // #{k : center_k <= L}
  double discrepancy = 0.0;  // |count - L|
  double band = 0.0;         // sqrt(L) / 5
  bool within_band = false;
};

struct CenterOrdering {
  std::vector<LocalizedEigenpair> pairs;  // sorted by center, ties by E
  double sup_discrepancy = 0.0;           // over every L in the box
};

/// Orders eigenpairs by localization center. Throws PreconditionError if the
/// spectrum carries no eigenvectors.
CenterOrdering localization_centers(const SpectrumResult& spec);

/// Counting function of centers at the requested L (box starting at site 1).
std::vector<CountingPoint> center_counting(std::span<const LocalizedEigenpair> pairs,
                                           std::span<const std::size_t> Ls);

/// Light-weight variant for long boxes: (E, center) pairs, center-ordered,
/// without keeping the eigenvectors.
struct CenteredEigenvalue {
  double E = 0.0;
  std::size_t center = 0;
};
std::vector<CenteredEigenvalue> center_ordered_eigenvalues(const TridiagonalBlock& block,
                                                           double tol);

struct DecayFit {
  bool pass = false;
  double fitted_rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  double min_distance = 0.0;  // max(sqrt(center), K)
  double worst_log_margin = 0.0;  // max over range of log|psi| + (1 - tau) gamma d
  double max_distance = 0.0;      // farthest distance whose bound is above the floor
};

/// Entries of a unit eigenvector below this are rounding noise.
inline constexpr double kDecayFloor = 64 * 2.220446049250313e-16;

/// Least-squares fit of log|psi(x)| against -rate * |x - center| on
/// |x - center| >= max(sqrt(center), K); passes iff
/// |psi(x)| <= exp(-(1 - tau) gamma_E |x - center|) on that range. Sites
/// where the bound itself drops below `floor` cannot be resolved in double
/// precision and are left out of both the check and the fit.
DecayFit decay_fit(const LocalizedEigenpair& pair, double gamma_E, double tau, double K,
                   double floor = kDecayFloor);

struct SpacingViolation {
  std::size_t k = 0;
  std::size_t k_prime = 0;
  double distance = 0.0;
};

struct SpacingCheck {
  double fitted_C = 0.0;  // smallest C with |E_k - E_k'| >= max(k, K)^-C for all k' < k
  std::vector<SpacingViolation> violations;  // against C_target
};

/// `energies` are indexed by center order: energies[k-1] = E_k.
SpacingCheck spacing_check(std::span<const double> energies, double K, double C_target);

struct BlockMatchRow {
  std::size_t rank = 0;    // position k in the center-ordered sequence, 1-based
  std::size_t center = 0;
  double E = 0.0;
  double distance = 0.0;          // dist(E_k, sigma(H_m))
  std::size_t nearest_index = 0;  // index into the block spectrum
  double residual = 0.0;          // ||(H_m - E_k) psi_k|_block|| / ||psi_k|_block||
};

struct BlockMatch {
  unsigned m = 0;
  std::size_t block_first = 0;  // first site of the block
  std::size_t block_last = 0;   // last site of the block
  std::size_t window_lo = 0;    // bulk window [lo, hi)
  std::size_t window_hi = 0;
  std::vector<double> block_spectrum;
  std::vector<BlockMatchRow> rows;
  double fitted_c = 0.0;        // largest c with every distance <= exp(-c 2^m)
  double max_distance = 0.0;
  double threshold = 0.0;       // 0.5 * 8^-m
  bool all_below_threshold = false;

  /// exp(-fitted_c 2^m), never below max_distance despite rounding in exp/log.
  double fitted_threshold() const noexcept;
};

struct BlockMatchOptions {
  int a = 1;              // block first site 4^m + a - 1
  int b = 1;              // block last site 2 * 4^m + b - 2
  std::size_t margin = 0; // bulk margin, 0 means 2^m
  double tol = 1e-13;
  // Select pairs by their rank k in center order (the k-th center sits near
  // site k) rather than by the center site itself.
  bool by_rank = true;
};

/// Compares box eigenpairs in the bulk window [4^m + margin, 2 * 4^m - margin)
/// with the spectrum of the dyadic block. `pairs` must be the full
/// center-ordered sequence of a box starting at site 1 when selecting by rank.
/// Throws PreconditionError if no pair lies in the window or the window is
/// empty.
BlockMatch block_match(std::span<const double> v, unsigned m,
                       std::span<const LocalizedEigenpair> pairs,
                       const BlockMatchOptions& options = {});

struct GoodBadSplit {
  std::vector<std::size_t> good;          // indices into the block spectrum
  std::vector<std::size_t> bad;
  std::vector<std::size_t> matched_center;  // per good eigenvalue
  bool unique_matches = true;
  double threshold = 0.0;
  bool good_count_ok = false;  // #good >= 4^m - 2^{m+1}
  bool bad_count_ok = false;   // #bad <= 2^{m+1}
};

/// Splits sigma(H_m) into eigenvalues within `threshold` of a bulk box
/// eigenvalue and the rest.
GoodBadSplit good_bad_split(const BlockMatch& match, double threshold);

/// Rows (realization, m, k, E_k, dist_to_block_spectrum, residual, decay_rate, pass_flags).
struct LocalizationCsvRow {
  std::size_t realization = 0;
  unsigned m = 0;
  std::size_t k = 0;
  double E = 0.0;
  double distance = 0.0;
  double residual = 0.0;
  double decay_rate = 0.0;
  unsigned pass_flags = 0;
};
void write_localization_csv(std::ostream& os, std::span<const LocalizationCsvRow> rows);

}  // namespace anderson
