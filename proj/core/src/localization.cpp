#include "anderson/localization.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "anderson/csv.hpp"
#include "anderson/errors.hpp"

namespace anderson {

namespace {

std::size_t argmax_abs(std::span<const double> psi) noexcept {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < psi.size(); ++i)
    if (std::abs(psi[i]) > std::abs(psi[arg])) arg = i;
  return arg;
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  std::size_t points = 0;
};

// Least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  f.points = x.size();
  if (x.size() < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LineFit tail_fit(std::span<const double> psi, std::size_t center_index, double min_distance) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = std::abs(static_cast<double>(i) - static_cast<double>(center_index));
    if (d < min_distance || psi[i] == 0.0) continue;
    xs.push_back(d);
    ys.push_back(std::log(std::abs(psi[i])));
  }
  return fit_line(xs, ys);
}

}  // namespace

CenterOrdering localization_centers(const SpectrumResult& spec) {
  if (!spec.has_vectors())
    throw PreconditionError("localization_centers: spectrum has no eigenvectors");
  CenterOrdering out;
  out.pairs.reserve(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    LocalizedEigenpair p;
    p.E = spec.eigenvalues[j];
    p.psi = spec.eigenvectors[j];
    p.box_offset = spec.offset;
    const std::size_t arg = argmax_abs(p.psi);
    p.center = spec.offset + arg;
    const LineFit f = tail_fit(p.psi, arg, 1.0);
    p.decay_rate = std::max(0.0, -f.slope);
    p.fit_quality = f.r2;
    out.pairs.push_back(std::move(p));
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const auto& x, const auto& y) {
    return x.center != y.center ? x.center < y.center : x.E < y.E;
  });
  // sup_L |#{center <= L} - L| over the box sites L = offset .. offset + n - 1.
  const std::size_t n = spec.size();
  std::size_t idx = 0;
  for (std::size_t L = 1; L <= n; ++L) {
    const std::size_t site = spec.offset + L - 1;
    while (idx < out.pairs.size() && out.pairs[idx].center <= site) ++idx;
    out.sup_discrepancy = std::max(out.sup_discrepancy,
                                   std::abs(static_cast<double>(idx) - static_cast<double>(L)));
  }
  return out;
}

std::vector<CountingPoint> center_counting(std::span<const LocalizedEigenpair> pairs,
                                           std::span<const std::size_t> Ls) {
  std::vector<CountingPoint> out;
  out.reserve(Ls.size());
  for (std::size_t L : Ls) {
    CountingPoint c;
    c.L = L;
    c.count = static_cast<std::size_t>(std::count_if(
        pairs.begin(), pairs.end(), [L](const auto& p) { return p.center <= L; }));
    c.discrepancy = std::abs(static_cast<double>(c.count) - static_cast<double>(L));
    c.band = std::sqrt(static_cast<double>(L)) / 5.0;
    c.within_band = c.discrepancy <= c.band;
    out.push_back(c);
  }
  return out;
}

std::vector<CenteredEigenvalue> center_ordered_eigenvalues(const TridiagonalBlock& block,
                                                           double tol) {
  const auto ev = eigenvalues_bisection(block, tol);
  const Interval g = block.gershgorin();
  const double floor = 4 * DBL_EPSILON * std::max({1.0, std::abs(g.lo), std::abs(g.hi)});
  std::vector<CenteredEigenvalue> out(ev.size());
  visit_eigenvectors(block, ev, 100.0 * std::max(tol, floor),
                     [&](std::size_t j, std::span<const double> psi, double) {
                       out[j] = {ev[j], block.offset() + argmax_abs(psi)};
                     });
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.center != y.center ? x.center < y.center : x.E < y.E;
  });
  return out;
}

DecayFit decay_fit(const LocalizedEigenpair& pair, double gamma_E, double tau, double K,
                   double floor) {
  if (!(gamma_E > 0)) throw PreconditionError("decay_fit: gamma_E must be > 0");
  if (!(tau > 0 && tau < 1)) throw PreconditionError("decay_fit: tau must lie in (0, 1)");
  if (!(floor > 0 && floor < 1)) throw PreconditionError("decay_fit: floor must lie in (0, 1)");
  DecayFit r;
  r.min_distance = std::max(std::sqrt(static_cast<double>(pair.center)), K);
  const std::size_t ci = pair.center - pair.box_offset;
  const double rate = (1.0 - tau) * gamma_E;
  r.max_distance = std::log(1.0 / floor) / rate;
  std::vector<double> xs, ys;
  r.pass = true;
  r.worst_log_margin = -std::numeric_limits<double>::infinity();
  std::size_t in_range = 0;
  for (std::size_t i = 0; i < pair.psi.size(); ++i) {
    const double d = std::abs(static_cast<double>(i) - static_cast<double>(ci));
    if (d < r.min_distance || d > r.max_distance) continue;
    ++in_range;
    const double a = std::abs(pair.psi[i]);
    if (a == 0.0) continue;
    const double la = std::log(a);
    xs.push_back(d);
    ys.push_back(la);
    const double margin = la + rate * d;
    r.worst_log_margin = std::max(r.worst_log_margin, margin);
    if (margin > 0) r.pass = false;
  }
  if (in_range == 0)
    throw PreconditionError("decay_fit: empty fit range, box too small for center " +
                            std::to_string(pair.center));
  const LineFit f = fit_line(xs, ys);
  r.fitted_rate = -f.slope;
  r.intercept = f.intercept;
  r.r_squared = f.r2;
  r.points = f.points;
  return r;
}

SpacingCheck spacing_check(std::span<const double> energies, double K, double C_target) {
  SpacingCheck out;
  std::multimap<double, std::size_t> seen;
  for (std::size_t idx = 0; idx < energies.size(); ++idx) {
    const std::size_t k = idx + 1;
    const double E = energies[idx];
    const double scale = std::max(static_cast<double>(k), K);
    if (!seen.empty()) {
      double dmin = std::numeric_limits<double>::infinity();
      auto it = seen.lower_bound(E);
      if (it != seen.end()) dmin = std::min(dmin, it->first - E);
      if (it != seen.begin()) dmin = std::min(dmin, E - std::prev(it)->first);
      if (dmin < 1.0) {
        const double need = scale > 1.0 ? std::log(1.0 / dmin) / std::log(scale)
                                        : std::numeric_limits<double>::infinity();
        out.fitted_C = std::max(out.fitted_C, need);
      }
      const double allowed = std::pow(scale, -C_target);
      for (auto v = seen.lower_bound(E - allowed); v != seen.end() && v->first <= E + allowed; ++v) {
        const double dist = std::abs(v->first - E);
        if (dist < allowed) out.violations.push_back({k, v->second, dist});
      }
    }
    seen.emplace(E, k);
  }
  return out;
}

BlockMatch block_match(std::span<const double> v, unsigned m,
                       std::span<const LocalizedEigenpair> pairs, const BlockMatchOptions& opt) {
  if (opt.a < 1 || opt.a > 2 || opt.b < 1 || opt.b > 2)
    throw PreconditionError("block_match: boundary variants a, b must be 1 or 2");
  const std::size_t four_m = std::size_t{1} << (2 * m);
  const std::size_t two_m = std::size_t{1} << m;
  const std::size_t margin = opt.margin == 0 ? two_m : opt.margin;

  BlockMatch r;
  r.m = m;
  r.block_first = four_m + static_cast<std::size_t>(opt.a) - 1;
  r.block_last = 2 * four_m + static_cast<std::size_t>(opt.b) - 2;
  r.window_lo = four_m + margin;
  r.window_hi = 2 * four_m > margin ? 2 * four_m - margin : 0;
  if (r.window_lo >= r.window_hi)
    throw PreconditionError("block_match: empty bulk window at level " + std::to_string(m));
  r.threshold = 0.5 * std::pow(8.0, -static_cast<double>(m));

  const TridiagonalBlock block = restrict_block(v, r.block_first, r.block_last);
  r.block_spectrum = eigenvalues_bisection(block, opt.tol);

  std::vector<double> phi(block.size()), hphi(block.size());
  if (opt.by_rank && !pairs.empty() && pairs.front().box_offset != 1)
    throw PreconditionError("block_match: rank selection needs a box starting at site 1");
  r.fitted_c = std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto& p = pairs[idx];
    const std::size_t key = opt.by_rank ? idx + 1 : p.center;
    if (key < r.window_lo || key >= r.window_hi) continue;
    if (p.box_offset > r.block_first || p.box_offset + p.psi.size() - 1 < r.block_last)
      throw PreconditionError("block_match: eigenvector box does not cover the block");
    BlockMatchRow row;
    row.rank = idx + 1;
    row.center = p.center;
    row.E = p.E;
    auto it = std::lower_bound(r.block_spectrum.begin(), r.block_spectrum.end(), p.E);
    double best = std::numeric_limits<double>::infinity();
    if (it != r.block_spectrum.end()) {
      best = *it - p.E;
      row.nearest_index = static_cast<std::size_t>(it - r.block_spectrum.begin());
    }
    if (it != r.block_spectrum.begin() && p.E - *std::prev(it) < best) {
      best = p.E - *std::prev(it);
      row.nearest_index = static_cast<std::size_t>(it - r.block_spectrum.begin()) - 1;
    }
    row.distance = best;

    double nphi = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      phi[i] = p.at_site(r.block_first + i);
      nphi += phi[i] * phi[i];
    }
    block.apply(phi, hphi);
    double res = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double t = hphi[i] - p.E * phi[i];
      res += t * t;
    }
    row.residual = nphi > 0 ? std::sqrt(res / nphi) : std::numeric_limits<double>::infinity();

    r.max_distance = std::max(r.max_distance, row.distance);
    r.fitted_c = std::min(r.fitted_c, -std::log(std::max(row.distance, DBL_MIN)) /
                                          static_cast<double>(two_m));
    r.rows.push_back(row);
  }
  if (r.rows.empty())
    throw PreconditionError("block_match: no eigenpair centered in the bulk window at level " +
                            std::to_string(m));
  r.all_below_threshold = r.max_distance < r.threshold;
  return r;
}

double BlockMatch::fitted_threshold() const noexcept {
  return std::max(std::exp(-fitted_c * std::ldexp(1.0, static_cast<int>(m))), max_distance);
}

GoodBadSplit good_bad_split(const BlockMatch& match, double threshold) {
  GoodBadSplit s;
  s.threshold = threshold;
  std::vector<double> bulk;
  bulk.reserve(match.rows.size());
  for (const auto& row : match.rows) bulk.push_back(row.E);
  std::vector<std::size_t> order(bulk.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return bulk[x] < bulk[y]; });
  std::vector<double> sorted(bulk.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = bulk[order[i]];

  for (std::size_t j = 0; j < match.block_spectrum.size(); ++j) {
    const double E = match.block_spectrum[j];
    auto first = std::lower_bound(sorted.begin(), sorted.end(), E - threshold);
    std::size_t hits = 0;
    std::size_t matched = 0;
    for (auto it = first; it != sorted.end() && *it <= E + threshold; ++it) {
      if (std::abs(*it - E) <= threshold) {
        if (hits == 0) matched = match.rows[order[static_cast<std::size_t>(it - sorted.begin())]].center;
        ++hits;
      }
    }
    if (hits > 0) {
      s.good.push_back(j);
      s.matched_center.push_back(matched);
      if (hits > 1) s.unique_matches = false;
    } else {
      s.bad.push_back(j);
    }
  }
  const double four_m = std::ldexp(1.0, 2 * static_cast<int>(match.m));
  const double two_m1 = std::ldexp(1.0, static_cast<int>(match.m) + 1);
  s.good_count_ok = static_cast<double>(s.good.size()) >= four_m - two_m1;
  s.bad_count_ok = static_cast<double>(s.bad.size()) <= two_m1;
  return s;
}

void write_localization_csv(std::ostream& os, std::span<const LocalizationCsvRow> rows) {
  CsvWriter csv(os, {"realization", "m", "k", "E_k", "dist_to_block_spectrum", "residual",
                     "decay_rate", "pass_flags"});
  for (const auto& r : rows) {
    csv << r.realization << r.m << r.k << r.E << r.distance << r.residual << r.decay_rate
        << r.pass_flags;
    csv.end_row();
  }
}

}  // namespace anderson
