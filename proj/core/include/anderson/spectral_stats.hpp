#pragma once

// Integrated density of states and eigenvalue-count statistics of finite
// blocks, all computed from Sturm counts.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "anderson/interval.hpp"
#include "anderson/potential.hpp"

namespace anderson {

struct IdsEstimate {
  std::vector<double> E_grid;          // sorted
  std::vector<double> N_values;        // mean of count(<= E) / L
  std::vector<double> N_std_err;
  std::vector<double> density;         // difference quotient of N on the grid
  std::vector<double> density_std_err;
  std::size_t block_length = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double A_emp = 0.0;                  // max density on the grid
  double a_I = 0.0;                    // filled by lower_wegner_check; NaN before
};

/// Monte Carlo IDS on `E_grid` from `trials` blocks H_[1,L]. Needs L >= 16
/// and a sorted grid inside [j_lo - 3, j_hi + 3].
IdsEstimate ids_estimate(const PotentialDistribution& dist, std::span<const double> E_grid,
                         std::size_t L, std::size_t trials, std::uint64_t seed,
                         unsigned workers = 0);

/// IDS of one fixed potential (trials = 1, zero error bars).
IdsEstimate ids_of_potential(std::span<const double> v, std::span<const double> E_grid);

/// Wraps precomputed IDS values, e.g. a synthetic or closed-form curve.
IdsEstimate ids_from_values(std::vector<double> E_grid, std::vector<double> N_values,
                            std::size_t block_length, std::size_t trials);

/// Uniform grid lo, lo + h, ..., up to hi (inclusive when it lands on it).
std::vector<double> uniform_grid(double lo, double hi, double h);

struct WegnerCheck {
  bool pass = false;
  double A = 0.0;
  double tol = 0.0;
  double max_density = 0.0;
  double argmax_E = 0.0;
  double max_density_std_err = 0.0;
};

/// pass iff max density <= A (1 + tol). Needs grid spacing <= 0.01.
WegnerCheck wegner_check(const IdsEstimate& ids, double A, double tol = 0.15);

struct LowerWegnerCheck {
  bool pass = false;  // a_I > 3 std errors
  Interval I;
  double a_I = 0.0;
  double a_I_std_err = 0.0;
  double argmin_E = 0.0;
  double A_emp = 0.0;
};

/// Min density over the grid points in I. I must lie strictly inside S and
/// contain at least one grid point; otherwise PreconditionError. Also stores
/// a_I into `ids`.
LowerWegnerCheck lower_wegner_check(IdsEstimate& ids, Interval I, Interval S);

struct MinamiRow {
  unsigned r = 0;
  double empirical = 0.0;  // P(#(sigma(H_L) in I) >= r)
  double std_err = 0.0;    // binomial
  double bound = 0.0;      // (A |I| L)^r / r!
  bool pass = false;       // empirical <= bound + 3 std_err
};

struct MinamiTail {
  std::size_t L = 0;
  Interval I;
  double A = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<MinamiRow> rows;  // r in {1, 2, r} (deduplicated, ascending)
  bool pass = false;
};

/// (A x)^r / r! evaluated in log space.
double minami_bound(double A, double interval_length, std::size_t L, unsigned r);

/// Needs trials >= 1000 and |I| > 0.
MinamiTail minami_tail(const PotentialDistribution& dist, std::size_t L, Interval I, unsigned r,
                       std::size_t trials, std::uint64_t seed, unsigned workers = 0);

struct CountConcentration {
  std::size_t L = 0;
  Interval I;
  double a_I = 0.0;
  double A = 0.0;                  // density bound used in the threshold
  double A_emp = 0.0;
  double count_threshold = 0.0;    // a_I |I| L / 2
  double empirical = 0.0;          // P(count >= count_threshold)
  double std_err = 0.0;
  double target = 0.0;             // a_I / (15 A_emp)
  bool pass = false;               // empirical >= target - 3 std_err
  std::size_t trials = 0;
};

/// Smallest L with min(1, a_I^2) / A |I| L >= 100.
std::size_t count_concentration_min_length(double a_I, double A, double interval_length);

/// Throws PreconditionError naming the minimum L when L is below it.
CountConcentration count_concentration(const PotentialDistribution& dist, std::size_t L,
                                       Interval I, double a_I, double A_emp,
                                       std::size_t trials, std::uint64_t seed,
                                       unsigned workers = 0);

/// Rows (E, N, N_std_err, density, density_std_err).
void write_ids_csv(std::ostream& os, const IdsEstimate& ids);
/// Rows (r, empirical, std_err, bound, pass).
void write_minami_csv(std::ostream& os, const MinamiTail& tail);

}  // namespace anderson
