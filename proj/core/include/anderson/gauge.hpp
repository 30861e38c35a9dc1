#pragma once

// Gauge functions, the series test for sum rho(alpha_k), and upper bounds on
// rho-Hausdorff measures from explicit covers.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anderson/approx.hpp"
#include "anderson/interval_union.hpp"

namespace anderson {

enum class GaugeKind { lebesgue, power, reciprocal_log, table };

struct GaugeNode {
  double t = 0.0;
  double rho = 0.0;
};

/// Non-decreasing continuous rho on [0, 1] with rho(0) = 0.
class GaugeFunction {
public:
  /// rho(t) = 2t.
  static GaugeFunction lebesgue();
  /// rho(t) = t^s, s in (0, 1].
  static GaugeFunction power(double s);
  /// rho(t) = 1 / max(1, log(1/t)), capped at 1 near t = 1.
  static GaugeFunction reciprocal_log();
  /// Piecewise-linear interpolation of nodes from (0, 0) to t = 1. When
  /// `claim_rho_over_t_nonincreasing` is set the claim is verified on a
  /// 10^4-point log grid and a false claim raises PreconditionError.
  static GaugeFunction table(std::vector<GaugeNode> nodes,
                             bool claim_rho_over_t_nonincreasing = false);

  GaugeKind kind() const noexcept { return kind_; }
  double s() const noexcept { return s_; }
  const std::vector<GaugeNode>& nodes() const noexcept { return nodes_; }
  bool rho_over_t_nonincreasing() const noexcept { return rho_over_t_nonincreasing_; }
  std::string name() const;

  /// rho(t); PreconditionError outside [0, 1].
  double operator()(double t) const;
  /// rho(exp(log_t)) for log_t <= 0, without underflow in exp(log_t).
  double eval_log(double log_t) const;

  /// Checks rho(t)/t on a log grid of `points` points over [1e-12, 1].
  bool verify_rho_over_t_nonincreasing(std::size_t points = 10000) const;

private:
  GaugeFunction() = default;
  GaugeKind kind_ = GaugeKind::lebesgue;
  double s_ = 1.0;
  std::vector<GaugeNode> nodes_;
  bool rho_over_t_nonincreasing_ = true;
};

double gauge_eval(const GaugeFunction& rho, double t);

enum class Verdict { integrable, non_integrable, inconclusive };
enum class SeriesVerdict { convergent, divergent, unknown };

const char* to_string(Verdict v) noexcept;
const char* to_string(SeriesVerdict v) noexcept;

struct PartialIntegral {
  double eps = 0.0;
  double value = 0.0;  // integral over [eps, 1] of rho(t)/t
};

struct IntegrabilityReport {
  Verdict verdict = Verdict::inconclusive;
  bool analytic = false;  // closed form classified exactly
  std::vector<PartialIntegral> partial;  // ascending eps
};

/// Log grid 10^-12 .. 1 with `per_decade` points per decade.
std::vector<double> default_eps_grid(std::size_t per_decade = 4);

/// Needs a strictly increasing grid in (0, 1] whose smallest point is <= 1e-12.
IntegrabilityReport integrability_test(const GaugeFunction& rho, std::span<const double> eps_grid);

struct SeriesPoint {
  std::size_t K = 0;
  double sum = 0.0;  // sum_{k <= K} rho(alpha_k)
};

/// Slack on the tail exponent before a series counts as convergent.
inline constexpr double kSeriesExponentMargin = 0.05;

struct SeriesReport {
  std::vector<SeriesPoint> partial;    // decades up to K, then K
  SeriesVerdict verdict = SeriesVerdict::unknown;
  bool analytic = false;
  /// For exponential alpha: integral over [1, K + 1] of rho(exp(-2 gamma_bar s)),
  /// a lower bound for the partial sum at K.
  std::optional<double> integral_lower_bound;
  /// Local decay exponent q of the terms (~ k^-q) from the last two decade
  /// increments, 1 - log10(d_last / d_prev); +inf when the terms vanish.
  /// NaN when K < 100.
  double tail_exponent = 0.0;
  /// Classification from tail_exponent alone: divergent iff q <= 1 + margin.
  SeriesVerdict empirical = SeriesVerdict::unknown;
};

SeriesReport series_test(const GaugeFunction& rho, const ApproxSequence& alpha, std::size_t K);

/// Analytic convergence class of sum rho(alpha_k) for closed-form pairs.
SeriesVerdict analytic_series_verdict(const GaugeFunction& rho, const ApproxSequence& alpha);

struct CoverPiece {
  double center = 0.0;
  double half_width = 0.0;
};

struct CoverEstimate {
  double eps = 0.0;
  double estimate = 0.0;       // sum rho(half_width)
  double infimum_so_far = 0.0;
  std::size_t pieces = 0;
};

/// Canonical cover: each component split evenly into pieces of half-width <= eps.
CoverEstimate cover_measure_upper(const IntervalUnion& target, const GaugeFunction& rho,
                                  double eps);

/// Explicit cover. Every half-width must be <= eps (PreconditionError) and
/// the cover must contain the target (CoverageError).
CoverEstimate cover_measure_upper(const IntervalUnion& target, std::span<const CoverPiece> cover,
                                  const GaugeFunction& rho, double eps);

/// Canonical-cover estimates for a decreasing list of meshes with the
/// running infimum.
std::vector<CoverEstimate> cover_measure_sweep(const IntervalUnion& target,
                                               const GaugeFunction& rho,
                                               std::span<const double> eps_list);

struct JarnikTail {
  std::size_t K = 0;
  double estimate = 0.0;   // sum_{k >= K} rho(alpha_k) over the list
  double eps = 0.0;        // largest half-width used, alpha_K
  double target_measure = 0.0;
};

/// The tail union of (E_k +- alpha_k), k >= K, covered by its own intervals.
JarnikTail jarnik_tail_cover(std::span<const double> E_list, const ApproxSequence& alpha,
                             const GaugeFunction& rho, std::size_t K);

}  // namespace anderson
