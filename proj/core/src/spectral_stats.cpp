#include "anderson/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "anderson/csv.hpp"
#include "anderson/errors.hpp"
#include "anderson/parallel.hpp"
#include "anderson/tridiagonal.hpp"

namespace anderson {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Difference quotient of f on the grid: central inside, one-sided at the ends.
double diff_quotient(std::span<const double> E, std::span<const double> f, std::size_t i) {
  const std::size_t n = E.size();
  const std::size_t a = i == 0 ? 0 : i - 1;
  const std::size_t b = i + 1 == n ? i : i + 1;
  return (f[b] - f[a]) / (E[b] - E[a]);
}

void check_grid(std::span<const double> E_grid) {
  if (E_grid.size() < 2) throw PreconditionError("ids: the energy grid needs at least 2 points");
  for (std::size_t i = 1; i < E_grid.size(); ++i)
    if (!(E_grid[i] > E_grid[i - 1]))
      throw PreconditionError("ids: the energy grid must be strictly increasing");
}

void fill_density_from_values(IdsEstimate& ids) {
  const std::size_t n = ids.E_grid.size();
  ids.density.resize(n);
  ids.density_std_err.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) ids.density[i] = diff_quotient(ids.E_grid, ids.N_values, i);
  ids.A_emp = *std::max_element(ids.density.begin(), ids.density.end());
}

double binomial_se(double p, std::size_t trials) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(trials));
}

// # eigenvalues of H_[1,L] in (lo, hi] for one trial.
std::size_t count_in(const TridiagonalBlock& block, Interval I) {
  const double e[2] = {I.lo, I.hi};
  std::size_t c[2];
  sturm_counts(block, e, c);
  return c[1] - c[0];
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, double h) {
  if (!(h > 0) || !(hi >= lo)) throw PreconditionError("uniform_grid: need h > 0 and hi >= lo");
  const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9));
  std::vector<double> g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = lo + h * static_cast<double>(i);
  return g;
}

IdsEstimate ids_estimate(const PotentialDistribution& dist, std::span<const double> E_grid,
                         std::size_t L, std::size_t trials, std::uint64_t seed,
                         unsigned workers) {
  if (L < 16) throw PreconditionError("ids_estimate: block length must be >= 16");
  if (trials < 2) throw PreconditionError("ids_estimate: trials must be >= 2");
  check_grid(E_grid);
  if (E_grid.front() < dist.j_lo() - 3.0 || E_grid.back() > dist.j_hi() + 3.0)
    throw PreconditionError("ids_estimate: grid must lie inside [j_lo - 3, j_hi + 3]");

  const std::size_t n = E_grid.size();
  auto counts = parallel_map(trials, workers, [&](std::size_t t) {
    TridiagonalBlock block(1, sample_potential(dist, L, seed, streams::trial(streams::kPotential, t)));
    std::vector<std::size_t> c(n);
    sturm_counts(block, E_grid, c);
    return c;
  });

  IdsEstimate ids;
  ids.E_grid.assign(E_grid.begin(), E_grid.end());
  ids.block_length = L;
  ids.trials = trials;
  ids.seed = seed;
  ids.a_I = kNaN;
  ids.N_values.assign(n, 0.0);
  ids.N_std_err.assign(n, 0.0);
  ids.density.assign(n, 0.0);
  ids.density_std_err.assign(n, 0.0);

  const double dL = static_cast<double>(L);
  const double dT = static_cast<double>(trials);
  std::vector<double> row(n);
  std::vector<unsigned long long> total(n, 0);
  std::vector<double> sq(n, 0.0), dsum(n, 0.0), dsq(n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      total[i] += counts[t][i];
      row[i] = static_cast<double>(counts[t][i]) / dL;
      sq[i] += row[i] * row[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double q = diff_quotient(E_grid, row, i);
      dsum[i] += q;
      dsq[i] += q * q;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Integer totals keep the mean exactly monotone in E.
    ids.N_values[i] = static_cast<double>(total[i]) / (dL * dT);
    const double m = ids.N_values[i];
    ids.N_std_err[i] = std::sqrt(std::max(0.0, (sq[i] - dT * m * m) / (dT - 1)) / dT);
    const double dm = dsum[i] / dT;
    ids.density[i] = dm;
    ids.density_std_err[i] = std::sqrt(std::max(0.0, (dsq[i] - dT * dm * dm) / (dT - 1)) / dT);
  }
  ids.A_emp = *std::max_element(ids.density.begin(), ids.density.end());
  return ids;
}

IdsEstimate ids_of_potential(std::span<const double> v, std::span<const double> E_grid) {
  check_grid(E_grid);
  if (v.empty()) throw PreconditionError("ids_of_potential: potential must be nonempty");
  TridiagonalBlock block(1, std::vector<double>(v.begin(), v.end()));
  std::vector<std::size_t> c(E_grid.size());
  sturm_counts(block, E_grid, c);
  std::vector<double> N(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    N[i] = static_cast<double>(c[i]) / static_cast<double>(v.size());
  return ids_from_values({E_grid.begin(), E_grid.end()}, std::move(N), v.size(), 1);
}

IdsEstimate ids_from_values(std::vector<double> E_grid, std::vector<double> N_values,
                            std::size_t block_length, std::size_t trials) {
  check_grid(E_grid);
  if (N_values.size() != E_grid.size())
    throw PreconditionError("ids_from_values: grid and values differ in length");
  IdsEstimate ids;
  ids.E_grid = std::move(E_grid);
  ids.N_values = std::move(N_values);
  ids.N_std_err.assign(ids.E_grid.size(), 0.0);
  ids.block_length = block_length;
  ids.trials = trials;
  ids.a_I = kNaN;
  fill_density_from_values(ids);
  return ids;
}

WegnerCheck wegner_check(const IdsEstimate& ids, double A, double tol) {
  if (ids.E_grid.size() < 2) throw PreconditionError("wegner_check: empty IDS");
  for (std::size_t i = 1; i < ids.E_grid.size(); ++i)
    if (ids.E_grid[i] - ids.E_grid[i - 1] > 0.01 + 1e-12)
      throw PreconditionError("wegner_check: grid spacing must be <= 0.01");
  WegnerCheck w;
  w.A = A;
  w.tol = tol;
  const auto it = std::max_element(ids.density.begin(), ids.density.end());
  const auto i = static_cast<std::size_t>(it - ids.density.begin());
  w.max_density = *it;
  w.argmax_E = ids.E_grid[i];
  w.max_density_std_err = ids.density_std_err[i];
  w.pass = w.max_density <= A * (1.0 + tol);
  return w;
}

LowerWegnerCheck lower_wegner_check(IdsEstimate& ids, Interval I, Interval S) {
  if (!S.strictly_contains(I))
    throw PreconditionError("lower_wegner_check: I must lie in the interior of S = [" +
                            format_double(S.lo) + ", " + format_double(S.hi) + "]");
  LowerWegnerCheck r;
  r.I = I;
  r.A_emp = ids.A_emp;
  r.a_I = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < ids.E_grid.size(); ++i) {
    if (!I.contains(ids.E_grid[i])) continue;
    any = true;
    if (ids.density[i] < r.a_I) {
      r.a_I = ids.density[i];
      r.a_I_std_err = ids.density_std_err[i];
      r.argmin_E = ids.E_grid[i];
    }
  }
  if (!any) throw PreconditionError("lower_wegner_check: no grid point inside I");
  r.pass = r.a_I > 3.0 * r.a_I_std_err && r.a_I > 0;
  ids.a_I = r.a_I;
  return r;
}

double minami_bound(double A, double interval_length, std::size_t L, unsigned r) {
  if (r == 0) return 1.0;
  const double x = A * interval_length * static_cast<double>(L);
  if (x == 0) return 0.0;
  return std::exp(static_cast<double>(r) * std::log(x) - std::lgamma(static_cast<double>(r) + 1.0));
}

MinamiTail minami_tail(const PotentialDistribution& dist, std::size_t L, Interval I, unsigned r,
                       std::size_t trials, std::uint64_t seed, unsigned workers) {
  if (trials < 1000) throw PreconditionError("minami_tail: trials must be >= 1000");
  if (L < 1) throw PreconditionError("minami_tail: block length must be >= 1");
  if (!(I.length() > 0)) throw PreconditionError("minami_tail: I must have positive length");
  auto counts = parallel_map(trials, workers, [&](std::size_t t) {
    TridiagonalBlock block(1, sample_potential(dist, L, seed, streams::trial(streams::kPotential, t)));
    return count_in(block, I);
  });
  MinamiTail out;
  out.L = L;
  out.I = I;
  out.A = dist.density_bound();
  out.trials = trials;
  out.seed = seed;
  std::vector<unsigned> rs{1u, 2u, r};
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  out.pass = true;
  for (unsigned rr : rs) {
    MinamiRow row;
    row.r = rr;
    const auto hits = std::count_if(counts.begin(), counts.end(), [rr](auto c) { return c >= rr; });
    row.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    row.std_err = binomial_se(row.empirical, trials);
    row.bound = minami_bound(out.A, I.length(), L, rr);
    row.pass = row.empirical <= row.bound + 3.0 * row.std_err;
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  }
  return out;
}

std::size_t count_concentration_min_length(double a_I, double A, double interval_length) {
  if (!(a_I > 0) || !(A > 0) || !(interval_length > 0))
    throw PreconditionError("count_concentration: need a_I, A, |I| > 0");
  const double q = std::min(1.0, a_I * a_I) / A * interval_length;
  return static_cast<std::size_t>(std::ceil(100.0 / q));
}

CountConcentration count_concentration(const PotentialDistribution& dist, std::size_t L,
                                       Interval I, double a_I, double A_emp,
                                       std::size_t trials, std::uint64_t seed,
                                       unsigned workers) {
  if (trials < 2) throw PreconditionError("count_concentration: trials must be >= 2");
  const double A = dist.density_bound();
  const std::size_t need = count_concentration_min_length(a_I, A, I.length());
  if (L < need)
    throw PreconditionError("count_concentration: L = " + std::to_string(L) +
                            " is below the length threshold; need L >= " + std::to_string(need));
  auto counts = parallel_map(trials, workers, [&](std::size_t t) {
    TridiagonalBlock block(1, sample_potential(dist, L, seed, streams::trial(streams::kPotential, t)));
    return count_in(block, I);
  });
  CountConcentration r;
  r.L = L;
  r.I = I;
  r.a_I = a_I;
  r.A = A;
  r.A_emp = A_emp;
  r.trials = trials;
  r.count_threshold = 0.5 * a_I * I.length() * static_cast<double>(L);
  const auto hits = std::count_if(counts.begin(), counts.end(), [&](auto c) {
    return static_cast<double>(c) >= r.count_threshold;
  });
  r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  r.std_err = binomial_se(r.empirical, trials);
  r.target = a_I / (15.0 * A_emp);
  r.pass = r.empirical >= r.target - 3.0 * r.std_err;
  return r;
}

void write_ids_csv(std::ostream& os, const IdsEstimate& ids) {
  CsvWriter csv(os, {"E", "N", "N_std_err", "density", "density_std_err"});
  for (std::size_t i = 0; i < ids.E_grid.size(); ++i) {
    csv << ids.E_grid[i] << ids.N_values[i] << ids.N_std_err[i] << ids.density[i]
        << ids.density_std_err[i];
    csv.end_row();
  }
}

void write_minami_csv(std::ostream& os, const MinamiTail& tail) {
  CsvWriter csv(os, {"r", "empirical", "std_err", "bound", "pass"});
  for (const auto& row : tail.rows) {
    csv << row.r << row.empirical << row.std_err << row.bound << row.pass;
    csv.end_row();
  }
}

}  // namespace anderson
