#include "anderson/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anderson/errors.hpp"

namespace anderson {

GaugeFunction GaugeFunction::lebesgue() {
  GaugeFunction g;
  g.kind_ = GaugeKind::lebesgue;
  return g;
}

GaugeFunction GaugeFunction::power(double s) {
  if (!(s > 0 && s <= 1)) throw PreconditionError("gauge: power exponent s must lie in (0, 1]");
  GaugeFunction g;
  g.kind_ = GaugeKind::power;
  g.s_ = s;
  return g;
}

GaugeFunction GaugeFunction::reciprocal_log() {
  GaugeFunction g;
  g.kind_ = GaugeKind::reciprocal_log;
  return g;
}

GaugeFunction GaugeFunction::table(std::vector<GaugeNode> nodes, bool claim) {
  if (nodes.size() < 2) throw PreconditionError("gauge: table needs at least 2 nodes");
  if (nodes.front().t != 0.0 || nodes.front().rho != 0.0)
    throw PreconditionError("gauge: table must start at (0, 0)");
  if (nodes.back().t != 1.0) throw PreconditionError("gauge: table must end at t = 1");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i].t > nodes[i - 1].t))
      throw PreconditionError("gauge: table t values must be strictly increasing");
    if (!(nodes[i].rho >= nodes[i - 1].rho) || !std::isfinite(nodes[i].rho))
      throw PreconditionError("gauge: table must be non-decreasing");
  }
  GaugeFunction g;
  g.kind_ = GaugeKind::table;
  g.nodes_ = std::move(nodes);
  g.rho_over_t_nonincreasing_ = claim;
  if (claim && !g.verify_rho_over_t_nonincreasing())
    throw PreconditionError("gauge: claimed rho(t)/t non-increasing, but the table violates it");
  return g;
}

std::string GaugeFunction::name() const {
  switch (kind_) {
    case GaugeKind::lebesgue: return "lebesgue";
    case GaugeKind::power: return "power";
    case GaugeKind::reciprocal_log: return "reciprocal_log";
    case GaugeKind::table: return "table";
  }
  return "?";
}

double GaugeFunction::eval_log(double log_t) const {
  if (!(log_t <= 0.0)) throw PreconditionError("gauge: log t must be <= 0");
  switch (kind_) {
    case GaugeKind::lebesgue: return 2.0 * std::exp(log_t);
    case GaugeKind::power: return std::exp(s_ * log_t);
    case GaugeKind::reciprocal_log: return 1.0 / std::max(1.0, -log_t);
    case GaugeKind::table: return (*this)(std::exp(log_t));
  }
  return 0.0;
}

double GaugeFunction::operator()(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw PreconditionError("gauge: t must lie in [0, 1]");
  switch (kind_) {
    case GaugeKind::lebesgue: return 2.0 * t;
    case GaugeKind::power: return std::pow(t, s_);
    case GaugeKind::reciprocal_log:
      return t == 0.0 ? 0.0 : 1.0 / std::max(1.0, -std::log(t));
    case GaugeKind::table: {
      auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                                 [](double x, const GaugeNode& n) { return x < n.t; });
      if (it == nodes_.end()) return nodes_.back().rho;
      const GaugeNode& b = *it;
      const GaugeNode& a = *std::prev(it);
      return a.rho + (b.rho - a.rho) * (t - a.t) / (b.t - a.t);
    }
  }
  return 0.0;
}

bool GaugeFunction::verify_rho_over_t_nonincreasing(std::size_t points) const {
  if (points < 2) points = 2;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = std::pow(10.0, -12.0 + 12.0 * static_cast<double>(i) / static_cast<double>(points - 1));
    const double q = (*this)(std::min(t, 1.0)) / t;
    if (q > prev * (1.0 + 1e-12)) return false;
    prev = q;
  }
  return true;
}

double gauge_eval(const GaugeFunction& rho, double t) { return rho(t); }

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::integrable: return "integrable";
    case Verdict::non_integrable: return "non-integrable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

const char* to_string(SeriesVerdict v) noexcept {
  switch (v) {
    case SeriesVerdict::convergent: return "convergent";
    case SeriesVerdict::divergent: return "divergent";
    case SeriesVerdict::unknown: return "unknown";
  }
  return "?";
}

namespace {

// Integral of rho(t)/t over [eps, 1], exact for every kind.
double tail_integral(const GaugeFunction& rho, double eps) {
  switch (rho.kind()) {
    case GaugeKind::lebesgue: return 2.0 * (1.0 - eps);
    case GaugeKind::power: return (1.0 - std::pow(eps, rho.s())) / rho.s();
    case GaugeKind::reciprocal_log: {
      const double L = -std::log(eps);  // log(1/eps)
      return L <= 1.0 ? L : 1.0 + std::log(L);
    }
    case GaugeKind::table: {
      double sum = 0.0;
      const auto& n = rho.nodes();
      for (std::size_t i = 1; i < n.size(); ++i) {
        const double ta = std::max(n[i - 1].t, eps), tb = n[i].t;
        if (tb <= ta) continue;
        const double beta = (n[i].rho - n[i - 1].rho) / (n[i].t - n[i - 1].t);
        const double alpha = n[i - 1].rho - beta * n[i - 1].t;
        sum += alpha * std::log(tb / ta) + beta * (tb - ta);
      }
      return sum;
    }
  }
  return 0.0;
}

}  // namespace

std::vector<double> default_eps_grid(std::size_t per_decade) {
  if (per_decade < 1) per_decade = 1;
  const std::size_t n = 12 * per_decade + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::pow(10.0, -12.0 + static_cast<double>(i) / static_cast<double>(per_decade));
  g.back() = 1.0;
  return g;
}

IntegrabilityReport integrability_test(const GaugeFunction& rho, std::span<const double> eps_grid) {
  if (eps_grid.size() < 2) throw PreconditionError("integrability_test: grid needs >= 2 points");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0 && eps_grid[i] <= 1))
      throw PreconditionError("integrability_test: grid points must lie in (0, 1]");
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))
      throw PreconditionError("integrability_test: grid must be strictly increasing");
  }
  if (eps_grid.front() > 1e-12 * (1 + 1e-9))
    throw PreconditionError("integrability_test: grid must reach down to 1e-12");

  IntegrabilityReport r;
  for (double e : eps_grid) r.partial.push_back({e, tail_integral(rho, e)});
  switch (rho.kind()) {
    case GaugeKind::lebesgue:
    case GaugeKind::power:
      r.verdict = Verdict::integrable;
      r.analytic = true;
      return r;
    case GaugeKind::reciprocal_log:
      r.verdict = Verdict::non_integrable;
      r.analytic = true;
      return r;
    case GaugeKind::table: break;
  }
  // Decade increments at the bottom of the grid: geometric decay reads as
  // convergence, a flat or growing profile as divergence.
  const double lo = eps_grid.front();
  const double d_last = tail_integral(rho, lo) - tail_integral(rho, 10 * lo);
  const double d_prev = tail_integral(rho, 10 * lo) - tail_integral(rho, 100 * lo);
  if (d_last <= 0.0 || (d_prev > 0 && d_last / d_prev < 0.5))
    r.verdict = Verdict::integrable;
  else if (d_prev > 0 && d_last / d_prev >= 0.9)
    r.verdict = Verdict::non_integrable;
  else
    r.verdict = Verdict::inconclusive;
  return r;
}

SeriesVerdict analytic_series_verdict(const GaugeFunction& rho, const ApproxSequence& alpha) {
  if (rho.kind() == GaugeKind::table || alpha.kind() == ApproxKind::table)
    return SeriesVerdict::unknown;
  if (alpha.kind() == ApproxKind::exponential)
    return rho.kind() == GaugeKind::reciprocal_log ? SeriesVerdict::divergent
                                                   : SeriesVerdict::convergent;
  // alpha_k ~ c k^-p; clamping turns p < 1 into p = 1.
  double p = alpha.kind() == ApproxKind::harmonic ? 1.0 : alpha.p();
  if (alpha.clamped()) p = std::max(p, 1.0);
  switch (rho.kind()) {
    case GaugeKind::lebesgue: return p <= 1.0 ? SeriesVerdict::divergent : SeriesVerdict::convergent;
    case GaugeKind::power:
      return rho.s() * p <= 1.0 ? SeriesVerdict::divergent : SeriesVerdict::convergent;
    case GaugeKind::reciprocal_log: return SeriesVerdict::divergent;
    case GaugeKind::table: break;
  }
  return SeriesVerdict::unknown;
}

namespace {
std::size_t ipow10(std::size_t j) noexcept {
  std::size_t x = 1;
  while (j-- > 0) x *= 10;
  return x;
}
}  // namespace

SeriesReport series_test(const GaugeFunction& rho, const ApproxSequence& alpha, std::size_t K) {
  if (K < 1) throw PreconditionError("series_test: K must be >= 1");
  SeriesReport r;
  double sum = 0.0, comp = 0.0;
  std::size_t next = 1;
  for (std::size_t k = 1; k <= K; ++k) {
    const double x = rho.eval_log(alpha.log_value(k));
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    if (k == next || k == K) {
      r.partial.push_back({k, sum + comp});
      if (k == next) next *= 10;
    }
  }
  r.verdict = analytic_series_verdict(rho, alpha);
  r.analytic = r.verdict != SeriesVerdict::unknown;

  // decade points sit at indices 0, 1, 2, ... (k = 10^j)
  std::size_t decades = 0;
  while (decades < r.partial.size() && r.partial[decades].K == ipow10(decades)) ++decades;
  if (decades >= 3) {
    const double d_last = r.partial[decades - 1].sum - r.partial[decades - 2].sum;
    const double d_prev = r.partial[decades - 2].sum - r.partial[decades - 3].sum;
    if (d_last <= 0 || d_prev <= 0)
      r.tail_exponent = std::numeric_limits<double>::infinity();
    else
      r.tail_exponent = 1.0 - std::log10(d_last / d_prev);
    r.empirical = r.tail_exponent <= 1.0 + kSeriesExponentMargin ? SeriesVerdict::divergent
                                                                 : SeriesVerdict::convergent;
  } else {
    r.tail_exponent = std::numeric_limits<double>::quiet_NaN();
  }

  // The clamp is inactive for exponential alpha once gamma_bar >= 1/(2e).
  if (alpha.kind() == ApproxKind::exponential &&
      (!alpha.clamped() || alpha.gamma_bar() >= 0.5 / std::exp(1.0))) {
    const double g = alpha.gamma_bar();
    const double b = static_cast<double>(K) + 1.0;
    switch (rho.kind()) {
      case GaugeKind::lebesgue:
        r.integral_lower_bound = (std::exp(-2 * g) - std::exp(-2 * g * b)) / g;
        break;
      case GaugeKind::power: {
        const double q = 2 * g * rho.s();
        r.integral_lower_bound = (std::exp(-q) - std::exp(-q * b)) / q;
        break;
      }
      case GaugeKind::reciprocal_log: {
        // rho(exp(-2 g s)) = 1 / max(1, 2 g s)
        const double s0 = 1.0 / (2 * g);
        double v = 0.0;
        if (s0 > 1.0) v += std::min(s0, b) - 1.0;
        const double a = std::max(1.0, s0);
        if (b > a) v += s0 * std::log(b / a);
        r.integral_lower_bound = v;
        break;
      }
      case GaugeKind::table: break;
    }
  }
  return r;
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0 && eps <= 1)) throw PreconditionError("cover_measure_upper: eps must lie in (0, 1]");
}

}  // namespace

CoverEstimate cover_measure_upper(const IntervalUnion& target, const GaugeFunction& rho,
                                  double eps) {
  check_eps(eps);
  CoverEstimate c;
  c.eps = eps;
  for (const auto& iv : target.intervals()) {
    const double len = iv.length();
    const double n = std::ceil(len / (2 * eps));
    c.estimate += n * rho(std::min(eps, len / (2 * n)));
    c.pieces += static_cast<std::size_t>(n);
  }
  c.infimum_so_far = c.estimate;
  return c;
}

CoverEstimate cover_measure_upper(const IntervalUnion& target, std::span<const CoverPiece> cover,
                                  const GaugeFunction& rho, double eps) {
  check_eps(eps);
  std::vector<Interval> pieces;
  pieces.reserve(cover.size());
  CoverEstimate c;
  c.eps = eps;
  for (const auto& p : cover) {
    if (!(p.half_width > 0) || p.half_width > eps)
      throw PreconditionError("cover_measure_upper: cover half-widths must lie in (0, eps]");
    pieces.push_back({p.center - p.half_width, p.center + p.half_width});
    c.estimate += rho(p.half_width);
  }
  if (!IntervalUnion(std::move(pieces)).covers(target))
    throw CoverageError("cover_measure_upper: the cover does not contain the target");
  c.pieces = cover.size();
  c.infimum_so_far = c.estimate;
  return c;
}

std::vector<CoverEstimate> cover_measure_sweep(const IntervalUnion& target,
                                               const GaugeFunction& rho,
                                               std::span<const double> eps_list) {
  std::vector<CoverEstimate> out;
  double best = std::numeric_limits<double>::infinity();
  for (double e : eps_list) {
    CoverEstimate c = cover_measure_upper(target, rho, e);
    best = std::min(best, c.estimate);
    c.infimum_so_far = best;
    out.push_back(c);
  }
  return out;
}

JarnikTail jarnik_tail_cover(std::span<const double> E_list, const ApproxSequence& alpha,
                             const GaugeFunction& rho, std::size_t K) {
  if (K < 1 || K > E_list.size())
    throw PreconditionError("jarnik_tail_cover: K must lie in [1, #eigenvalues]");
  std::vector<CoverPiece> cover;
  std::vector<Interval> pieces;
  // radii that underflow still cost rho(alpha_k) > 0 in the cover
  double underflow = 0.0;
  for (std::size_t k = K; k <= E_list.size(); ++k) {
    const double a = alpha(k);
    if (!(a > 0)) {
      underflow += rho.eval_log(alpha.log_value(k));
      continue;
    }
    cover.push_back({E_list[k - 1], a});
    pieces.push_back({E_list[k - 1] - a, E_list[k - 1] + a});
  }
  const IntervalUnion target(std::move(pieces));
  JarnikTail j;
  j.K = K;
  j.eps = alpha(K);
  j.target_measure = target.measure();
  j.estimate = underflow;
  if (!cover.empty())
    j.estimate += cover_measure_upper(target, cover, rho, std::min(1.0, j.eps)).estimate;
  return j;
}

}  // namespace anderson
