#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "anderson/approx.hpp"
#include "anderson/csv.hpp"
#include "anderson/errors.hpp"
#include "anderson/gauge.hpp"
#include "anderson/localization.hpp"
#include "anderson/parallel.hpp"
#include "anderson/spectral_stats.hpp"
#include "anderson/transfer.hpp"
#include "anderson/tridiagonal.hpp"

namespace lab {

namespace an = anderson;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no NaN or infinity; such values are reported as null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the auxiliary gamma_hat table, independent of the realizations.
std::uint64_t gamma_seed(std::uint64_t master) { return splitmix64(master ^ 0x67616d6d61ULL); }

template <class Fn>
auto with_origin(std::uint64_t seed, std::uint64_t stream, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const an::NumericError& e) {
    if (e.has_origin()) throw;
    throw e.with_origin(seed, stream);
  }
}

Table make_table(std::string name, const std::string& csv) {
  Table t;
  t.name = std::move(name);
  t.csv = csv;
  t.rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  if (t.rows > 0) --t.rows;  // header
  return t;
}

Check check(std::string name, double value, std::string relation, double threshold,
            std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.relation = relation;
  c.threshold = threshold;
  c.detail = std::move(detail);
  if (relation == "<=") c.pass = value <= threshold;
  else if (relation == "<") c.pass = value < threshold;
  else if (relation == ">=") c.pass = value >= threshold;
  else if (relation == ">") c.pass = value > threshold;
  else if (relation == "==") c.pass = value == threshold;
  return c;
}

an::LyapunovCurve gamma_curve(const Config& c, unsigned workers) {
  const auto S = an::essential_spectrum(*c.distribution);
  std::vector<double> grid(c.gamma_points);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = S.lo + S.length() * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  return an::LyapunovCurve(an::lyapunov_estimates(*c.distribution, grid, c.gamma_n,
                                                  c.gamma_trials, gamma_seed(c.master_seed),
                                                  workers));
}

std::vector<double> realization(const Config& c, std::size_t t, std::size_t n) {
  return an::sample_potential(*c.distribution, n, c.master_seed,
                              an::streams::trial(an::streams::kPotential, t));
}

// ---------------------------------------------------------------------------

Report run_lyapunov(const Config& c, unsigned workers) {
  const auto grid = c.energies->values();
  const auto rows =
      an::lyapunov_estimates(*c.distribution, grid, c.n, c.trials, c.master_seed, workers);
  std::ostringstream os;
  an::write_lyapunov_csv(os, rows);
  Report r;
  r.tables.push_back(make_table("lyapunov", os.str()));

  double min_ratio = std::numeric_limits<double>::infinity(), min_g = min_ratio, max_g = -min_g;
  bool finite = true;
  for (const auto& e : rows) {
    finite = finite && std::isfinite(e.gamma_hat) && std::isfinite(e.std_err);
    min_g = std::min(min_g, e.gamma_hat);
    max_g = std::max(max_g, e.gamma_hat);
    min_ratio = std::min(min_ratio, e.std_err > 0 ? e.gamma_hat / e.std_err
                                                  : std::numeric_limits<double>::infinity());
  }
  r.summary["min_gamma_hat"] = num(min_g);
  r.summary["max_gamma_hat"] = num(max_g);
  r.summary["min_gamma_over_std_err"] = num(min_ratio);
  r.checks.push_back(check("finite_estimates", finite ? 1 : 0, "==", 1));
  r.checks.push_back(check("positivity", min_ratio, ">", 5.0,
                           "min over the grid of gamma_hat / std_err"));
  return r;
}

Report run_ids(const Config& c, unsigned workers) {
  const auto grid = c.energies->values();
  auto ids = an::ids_estimate(*c.distribution, grid, c.L, c.trials, c.master_seed, workers);
  Report r;
  double max_drop = 0.0, out_of_range = 0.0;
  for (std::size_t i = 0; i < ids.N_values.size(); ++i) {
    const double N = ids.N_values[i];
    out_of_range = std::max({out_of_range, -N, N - 1});
    if (i > 0) max_drop = std::max(max_drop, ids.N_values[i - 1] - N);
  }
  r.checks.push_back(check("monotone", max_drop, "<=", 0.0, "largest decrease between grid points"));
  r.checks.push_back(check("unit_range", out_of_range, "<=", 0.0, "largest excursion outside [0, 1]"));
  r.summary["A_emp"] = num(ids.A_emp);

  if (c.experiment == Experiment::wegner) {
    const double A = c.distribution->density_bound();
    const auto w = an::wegner_check(ids, A, c.tol);
    r.summary["A"] = A;
    r.summary["argmax_E"] = w.argmax_E;
    r.summary["max_density_std_err"] = num(w.max_density_std_err);
    r.checks.push_back(check("wegner", w.max_density, "<=", A * (1 + w.tol),
                             "max IDS density against A (1 + tol)"));
    if (c.interval) {
      const auto lw =
          an::lower_wegner_check(ids, *c.interval, an::essential_spectrum(*c.distribution));
      r.summary["a_I"] = num(lw.a_I);
      r.summary["a_I_std_err"] = num(lw.a_I_std_err);
      r.summary["a_I_argmin_E"] = lw.argmin_E;
      r.checks.push_back(check("lower_wegner", lw.a_I, ">", 3 * lw.a_I_std_err,
                               "min density on I against 3 standard errors"));
    }
  }
  std::ostringstream os;
  an::write_ids_csv(os, ids);
  r.tables.push_back(make_table("ids", os.str()));
  return r;
}

Report run_minami(const Config& c, unsigned workers) {
  const auto t =
      an::minami_tail(*c.distribution, c.L, *c.interval, c.r, c.trials, c.master_seed, workers);
  Report r;
  for (const auto& row : t.rows)
    r.checks.push_back(check("tail_r" + std::to_string(row.r), row.empirical, "<=",
                             row.bound + 3 * row.std_err,
                             "P(count >= r) against (A |I| L)^r / r! + 3 std errors"));
  r.summary["A"] = t.A;
  std::ostringstream os;
  an::write_minami_csv(os, t);
  r.tables.push_back(make_table("minami", os.str()));
  return r;
}

Report run_localization(const Config& c, unsigned workers) {
  const auto gamma = gamma_curve(c, workers);
  const double K = c.decay_K > 0 ? c.decay_K : std::ceil(8.0 / gamma.min_gamma());
  const std::size_t bulk_lo = c.n / 4, bulk_hi = 3 * c.n / 4;

  struct Out {
    std::vector<an::LocalizationCsvRow> rows;
    std::vector<an::CountingPoint> counting;
    std::size_t passed = 0, tested = 0;
  };
  const auto outs = an::parallel_map(c.trials, workers, [&](std::size_t t) {
    const auto stream = an::streams::trial(an::streams::kPotential, t);
    return with_origin(c.master_seed, stream, [&] {
      const auto v = realization(c, t, c.n);
      const auto spec = an::spectrum(an::restrict_block(v, 1, c.n), c.tol, true);
      const auto co = an::localization_centers(spec);
      Out o;
      o.counting = an::center_counting(co.pairs, c.counting_L);
      for (std::size_t k = bulk_lo; k < bulk_hi && k <= co.pairs.size(); ++k) {
        if (k == 0) continue;
        const auto& p = co.pairs[k - 1];
        const auto fit = an::decay_fit(p, gamma(p.E), c.tau, K);
        ++o.tested;
        o.passed += fit.pass ? 1 : 0;
        o.rows.push_back({t, 0, k, p.E, kNaN, kNaN, fit.fitted_rate, fit.pass ? 1u : 0u});
      }
      return o;
    });
  });

  Report r;
  std::vector<an::LocalizationCsvRow> rows;
  std::ostringstream counting;
  an::CsvWriter cw(counting, {"realization", "L", "count", "discrepancy", "band", "within_band"});
  std::size_t passed = 0, tested = 0, band_ok = 0, band_total = 0;
  for (std::size_t t = 0; t < outs.size(); ++t) {
    rows.insert(rows.end(), outs[t].rows.begin(), outs[t].rows.end());
    passed += outs[t].passed;
    tested += outs[t].tested;
    for (const auto& p : outs[t].counting) {
      cw << t << p.L << p.count << p.discrepancy << p.band << p.within_band;
      cw.end_row();
      band_ok += p.within_band ? 1 : 0;
      ++band_total;
    }
  }
  std::ostringstream os;
  an::write_localization_csv(os, rows);
  r.tables.push_back(make_table("localization", os.str()));
  r.tables.push_back(make_table("counting", counting.str()));

  const double frac = tested ? static_cast<double>(passed) / static_cast<double>(tested) : 0.0;
  r.summary["decay_K"] = K;
  r.summary["min_gamma_hat"] = gamma.min_gamma();
  r.summary["bulk_pairs_tested"] = tested;
  r.checks.push_back(check("decay_fraction", frac, ">=", 0.9,
                           "share of bulk eigenpairs passing the decay fit"));
  r.checks.push_back(check("counting_band",
                           band_total ? static_cast<double>(band_ok) / static_cast<double>(band_total) : 0.0,
                           "==", 1.0, "share of (realization, L) inside sqrt(L) / 5"));
  return r;
}

Report run_blockmatch(const Config& c, unsigned workers) {
  const std::size_t four_m = std::size_t{1} << (2 * c.m);
  const std::size_t n = 2 * four_m + c.padding;
  const std::size_t bad_limit = std::size_t{2} << c.m;

  struct Out {
    std::vector<an::LocalizationCsvRow> rows;
    bool all_below = false;
    std::size_t bad = 0;
    double max_distance = 0.0;
    double fitted_c = 0.0;
  };
  const auto outs = an::parallel_map(c.trials, workers, [&](std::size_t t) {
    const auto stream = an::streams::trial(an::streams::kPotential, t);
    return with_origin(c.master_seed, stream, [&] {
      const auto v = realization(c, t, n);
      const auto spec = an::spectrum(an::restrict_block(v, 1, n), c.tol, true);
      const auto co = an::localization_centers(spec);
      an::BlockMatchOptions opt;
      opt.tol = c.tol;
      const auto bm = an::block_match(v, c.m, co.pairs, opt);
      const auto split = an::good_bad_split(bm, bm.fitted_threshold());
      Out o;
      o.all_below = bm.all_below_threshold;
      o.bad = split.bad.size();
      o.max_distance = bm.max_distance;
      o.fitted_c = bm.fitted_c;
      for (const auto& row : bm.rows)
        o.rows.push_back({t, c.m, row.rank, row.E, row.distance, row.residual, kNaN,
                          row.distance < bm.threshold ? 1u : 0u});
      return o;
    });
  });

  Report r;
  std::vector<an::LocalizationCsvRow> rows;
  std::ostringstream per;
  an::CsvWriter pw(per, {"realization", "max_distance", "fitted_c", "all_below_threshold", "bad_count"});
  std::size_t all_below = 0, bad_ok = 0;
  for (std::size_t t = 0; t < outs.size(); ++t) {
    const auto& o = outs[t];
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    all_below += o.all_below ? 1 : 0;
    bad_ok += o.bad <= bad_limit ? 1 : 0;
    pw << t << o.max_distance << o.fitted_c << o.all_below << o.bad;
    pw.end_row();
  }
  std::ostringstream os;
  an::write_localization_csv(os, rows);
  r.tables.push_back(make_table("blockmatch", os.str()));
  r.tables.push_back(make_table("blockmatch_realizations", per.str()));
  const double T = static_cast<double>(c.trials);
  r.summary["box_length"] = n;
  r.summary["threshold"] = 0.5 * std::pow(8.0, -static_cast<double>(c.m));
  r.summary["bad_limit"] = bad_limit;
  r.checks.push_back(check("all_below_threshold", static_cast<double>(all_below) / T, "==", 1.0,
                           "share of realizations with every bulk distance below 1/2 8^-m"));
  r.checks.push_back(check("bad_count", static_cast<double>(bad_ok) / T, ">=", 0.95,
                           "share of realizations with #bad <= 2^(m+1)"));
  return r;
}

Report run_khinchin(const Config& c, unsigned workers) {
  an::KhinchinOptions opt;
  opt.padding = c.padding;
  opt.tol = c.tol;
  const auto rep = an::khinchin_experiment(*c.distribution, *c.interval, *c.alpha, c.K,
                                           c.checkpoints, c.trials, c.master_seed, opt, workers);
  Report r;
  std::ostringstream cp, lv;
  an::CsvWriter cw(cp, {"trial", "K", "covered", "tail", "tail_bound"});
  an::CsvWriter lw(lv, {"trial", "m", "block_count", "bad_count", "alpha", "partial_all", "partial_bad"});
  double worst = -std::numeric_limits<double>::infinity(), covered_sum = 0.0;
  for (std::size_t t = 0; t < rep.trials.size(); ++t) {
    const auto& tr = rep.trials[t];
    for (const auto& p : tr.checkpoints) {
      cw << t << p.K << p.covered << p.tail << p.tail_bound;
      cw.end_row();
      worst = std::max(worst, p.tail - p.tail_bound);
    }
    if (!tr.checkpoints.empty()) covered_sum += tr.checkpoints.back().covered;
    for (const auto& l : tr.levels) {
      lw << t << l.m << l.block_count << l.bad_count << l.alpha << l.partial_all << l.partial_bad;
      lw.end_row();
    }
  }
  r.tables.push_back(make_table("khinchin", cp.str()));
  r.tables.push_back(make_table("khinchin_levels", lv.str()));
  r.summary["divergent"] = rep.divergent;
  r.summary["box_length"] = rep.box_length;
  r.summary["mean_covered_at_K"] = num(covered_sum / static_cast<double>(rep.trials.size()));
  r.summary["interval_length"] = c.interval->length();
  r.checks.push_back(check("tail_within_sum", worst, "<=", 0.0,
                           "max over checkpoints of tail measure minus sum of 2 alpha_k"));
  return r;
}

Report run_jarnik(const Config& c, unsigned) {
  const auto s = an::series_test(*c.gauge, *c.alpha, c.K);
  const auto integ = an::integrability_test(*c.gauge, an::default_eps_grid());
  Report r;
  std::ostringstream ss, is;
  an::CsvWriter sw(ss, {"K", "partial_sum"});
  for (const auto& p : s.partial) {
    sw << p.K << p.sum;
    sw.end_row();
  }
  an::CsvWriter iw(is, {"eps", "integral"});
  for (const auto& p : integ.partial) {
    iw << p.eps << p.value;
    iw.end_row();
  }
  r.tables.push_back(make_table("series", ss.str()));
  r.tables.push_back(make_table("integrability", is.str()));
  r.summary["gauge"] = c.gauge->name();
  r.summary["series_analytic"] = an::to_string(s.verdict);
  r.summary["series_empirical"] = an::to_string(s.empirical);
  r.summary["tail_exponent"] = num(s.tail_exponent);
  r.summary["integrability"] = an::to_string(integ.verdict);
  r.summary["partial_sum_at_K"] = s.partial.back().sum;
  if (s.integral_lower_bound) {
    r.summary["integral_lower_bound"] = *s.integral_lower_bound;
    r.checks.push_back(check("integral_lower_bound", s.partial.back().sum, ">=",
                             *s.integral_lower_bound,
                             "partial sum at K against the integral comparison"));
  }
  if (c.alpha->kind() == an::ApproxKind::exponential && c.K >= 10) {
    const double g = c.alpha->gamma_bar();
    const double predicted = std::log(static_cast<double>(c.K)) / (2 * g);
    r.summary["log_growth_prediction"] = predicted;
    r.summary["log_growth_ratio"] = s.partial.back().sum / predicted;
  }
  if (s.analytic && s.empirical != an::SeriesVerdict::unknown)
    r.checks.push_back(check("series_verdict", s.empirical == s.verdict ? 1 : 0, "==", 1,
                             "empirical tail-exponent verdict equals the analytic class"));
  return r;
}

Report run_nonlyap(const Config& c, unsigned workers) {
  const auto grid = c.energies->values();
  const auto gam = an::lyapunov_estimates(*c.distribution, grid, c.gamma_n, c.gamma_trials,
                                          gamma_seed(c.master_seed), workers);
  struct Out {
    std::vector<an::NonLyapunovScan> scans;
  };
  const auto outs = an::parallel_map(c.trials, workers, [&](std::size_t t) {
    const auto v = realization(c, t, c.n);
    Out o;
    for (std::size_t i = 0; i < grid.size(); ++i)
      o.scans.push_back(an::non_lyapunov_scan(v, grid[i], c.n, c.tau, gam[i].gamma_hat));
    return o;
  });
  Report r;
  std::ostringstream os;
  an::CsvWriter w(os, {"trial", "E", "gamma_ref", "min_rate", "argmin", "flag"});
  std::size_t flagged = 0, total = 0;
  bool finite = true;
  for (std::size_t t = 0; t < outs.size(); ++t)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& s = outs[t].scans[i];
      w << t << grid[i] << gam[i].gamma_hat << s.min_rate << s.argmin << s.flag;
      w.end_row();
      flagged += s.flag ? 1 : 0;
      ++total;
      finite = finite && std::isfinite(s.min_rate);
    }
  r.tables.push_back(make_table("nonlyap", os.str()));
  r.summary["flagged"] = flagged;
  r.summary["scanned"] = total;
  r.summary["flagged_fraction"] = static_cast<double>(flagged) / static_cast<double>(total);
  r.checks.push_back(check("finite_rates", finite ? 1 : 0, "==", 1));
  return r;
}

Report run_propa(const Config& c, unsigned workers) {
  const auto gamma = gamma_curve(c, workers);
  double gamma_bar = 0.0;
  for (const auto& e : gamma.estimates()) gamma_bar = std::max(gamma_bar, e.gamma_hat);

  struct Row {
    std::size_t k, center;
    double E, gamma_k;
    an::PropAEvaluation eval;
  };
  const auto outs = an::parallel_map(c.trials, workers, [&](std::size_t t) {
    const auto stream = an::streams::trial(an::streams::kPotential, t);
    return with_origin(c.master_seed, stream, [&] {
      const auto v = realization(c, t, c.n);
      const auto spec = an::spectrum(an::restrict_block(v, 1, c.n), c.tol, true);
      const auto co = an::localization_centers(spec);
      std::vector<Row> rows;
      for (std::size_t k = c.k_lo; k <= c.k_hi && k <= co.pairs.size(); ++k) {
        const auto& p = co.pairs[k - 1];
        const double gk = gamma(p.E);
        const auto rep = an::prop_a_check(v, p.E, k, gk, std::max(gamma_bar, gk), c.tau);
        rows.push_back({k, p.center, p.E, gk, rep.evaluations.front()});
      }
      return rows;
    });
  });
  Report r;
  std::ostringstream os;
  an::CsvWriter w(os, {"realization", "k", "center", "E_k", "gamma_k", "log_norm", "bound_gamma",
                       "within_gamma", "bound_linear", "within_linear"});
  std::size_t within = 0, total = 0;
  for (std::size_t t = 0; t < outs.size(); ++t)
    for (const auto& row : outs[t]) {
      w << t << row.k << row.center << row.E << row.gamma_k << row.eval.log_norm
        << row.eval.bound_gamma << row.eval.within_gamma << row.eval.bound_linear
        << row.eval.within_linear;
      w.end_row();
      within += row.eval.within_gamma ? 1 : 0;
      ++total;
    }
  r.tables.push_back(make_table("propa", os.str()));
  r.summary["gamma_bar"] = gamma_bar;
  r.summary["tested"] = total;
  r.checks.push_back(check("dip_fraction",
                           total ? static_cast<double>(within) / static_cast<double>(total) : 0.0,
                           ">=", 0.8, "share of pairs with log ||Phi_2k(E_k)|| <= 12 tau gamma_k k"));
  return r;
}

}  // namespace

Report run_experiment(const Config& c, unsigned workers) {
  switch (c.experiment) {
    case Experiment::lyapunov: return run_lyapunov(c, workers);
    case Experiment::ids:
    case Experiment::wegner: return run_ids(c, workers);
    case Experiment::minami: return run_minami(c, workers);
    case Experiment::localization: return run_localization(c, workers);
    case Experiment::blockmatch: return run_blockmatch(c, workers);
    case Experiment::khinchin: return run_khinchin(c, workers);
    case Experiment::jarnik: return run_jarnik(c, workers);
    case Experiment::nonlyap: return run_nonlyap(c, workers);
    case Experiment::propa: return run_propa(c, workers);
  }
  throw an::Error("unhandled experiment");
}

}  // namespace lab
