#pragma once

// Transfer matrices T_n(E) = [[E - v_n, -1], [1, 0]], their ordered products
// Phi_n(E) = T_n ... T_1, and Lyapunov-exponent estimates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "anderson/potential.hpp"

namespace anderson {

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const noexcept { return a * d - b * c; }
  double max_abs() const noexcept;
  /// Operator 2-norm (largest singular value).
  double norm() const noexcept;

  friend Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 transfer_step(double E, double v) noexcept;

/// Phi_n(E) = exp(log_scale) * matrix, with the largest entry of `matrix` in
/// [1/2, 2] whenever a renormalization has happened.
struct TransferProduct {
  Mat2 matrix;
  double log_scale = 0.0;
  std::size_t n = 0;
  double E = 0.0;

  /// log ||Phi_n(E)||.
  double log_norm() const noexcept;

  /// |det(matrix) exp(2 log_scale) - 1|, the exact-arithmetic value is 0.
  /// Only meaningful while ||Phi_n|| is moderate: the determinant of a
  /// near-rank-one normalized matrix cancels catastrophically.
  double determinant_defect() const noexcept;

  /// The determinant defect measured against ||matrix||^2, i.e.
  /// |det(matrix) - exp(-2 log_scale)| / ||matrix||^2. This is the scale at
  /// which floating-point products can preserve det = 1.
  double determinant_defect_normwise() const noexcept;
};

/// Incremental left multiplication by transfer matrices with exact
/// power-of-two renormalization.
class TransferAccumulator {
public:
  /// Renormalizes whenever the largest entry leaves [2^-e, 2^e].
  explicit TransferAccumulator(double E, int renorm_exponent = 64) noexcept;

  void push(double v) noexcept;
  double log_norm() const noexcept;
  const TransferProduct& product() const noexcept { return p_; }
  std::size_t renormalizations() const noexcept { return renorms_; }

private:
  void renormalize() noexcept;

  TransferProduct p_;
  double hi_;
  double lo_;
  std::size_t renorms_ = 0;
};

struct TransferOptions {
  int renorm_exponent = 64;
  bool trace = false;  // record log ||Phi_j|| for every j
};

struct TransferResult {
  TransferProduct product;
  std::vector<double> log_norm_trace;  // entry j-1 holds log ||Phi_j||
};

/// Phi_n(E) for n = v.size(). Needs a nonempty potential.
TransferResult transfer_product(std::span<const double> v, double E,
                                const TransferOptions& options = {});

struct LyapunovEstimate {
  double E = 0.0;
  double gamma_hat = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Draws one potential value from a stream.
using PotentialSampler = std::function<double(RandomStream&)>;

/// gamma_hat = mean over trials of (1/n) log ||Phi_n(E)||, with the standard
/// error of the mean. Trial t uses stream streams::trial(kPotential, t), so a
/// trial sees the same potential at every energy. Needs n >= 1000, trials >= 2.
LyapunovEstimate lyapunov_estimate(const PotentialDistribution& dist, double E, std::size_t n,
                                   std::size_t trials, std::uint64_t seed, unsigned workers = 0);

/// Same with an arbitrary sampler, e.g. a constant potential.
LyapunovEstimate lyapunov_estimate(const PotentialSampler& sampler, double E, std::size_t n,
                                   std::size_t trials, std::uint64_t seed, unsigned workers = 0);

/// One estimate per energy; each trial's potential is drawn once and swept
/// across all energies.
std::vector<LyapunovEstimate> lyapunov_estimates(const PotentialDistribution& dist,
                                                 std::span<const double> energies, std::size_t n,
                                                 std::size_t trials, std::uint64_t seed,
                                                 unsigned workers = 0);

/// Piecewise-linear gamma_hat(E) through a set of estimates, constant beyond
/// the outermost energies.
class LyapunovCurve {
public:
  /// Needs at least one estimate; energies are sorted internally and must
  /// be distinct.
  explicit LyapunovCurve(std::vector<LyapunovEstimate> estimates);

  double operator()(double E) const noexcept;
  double min_gamma() const noexcept;
  const std::vector<LyapunovEstimate>& estimates() const noexcept { return pts_; }

private:
  std::vector<LyapunovEstimate> pts_;
};

struct GrowthPoint {
  std::size_t n = 0;
  double rate = 0.0;  // (1/n) log ||Phi_n(E)||
};

/// Normalized log-norms at increasing checkpoints, from one sweep.
std::vector<GrowthPoint> growth_profile(std::span<const double> v, double E,
                                        std::span<const std::size_t> checkpoints);

struct NonLyapunovScan {
  bool flag = false;       // min_rate <= tau * gamma_ref
  double min_rate = 0.0;   // min over n in [ceil(sqrt N), N]
  std::size_t argmin = 0;  // the n attaining min_rate
};

/// Finite-horizon proxy for membership in the set where the liminf of the
/// growth rate is at most tau * gamma. Never claims convergence.
NonLyapunovScan non_lyapunov_scan(std::span<const double> v, double E, std::size_t horizon,
                                  double tau, double gamma_ref);

struct PropAEvaluation {
  double E = 0.0;
  double log_norm = 0.0;        // log ||Phi_2k(E)||
  double bound_gamma = 0.0;     // 12 tau gamma_k k
  double bound_linear = 0.0;    // 6 tau n, n = 2k
  bool within_gamma = false;
  bool within_linear = false;
};

struct PropAReport {
  std::size_t k = 0;
  std::size_t n = 0;
  double radius = 0.0;     // exp(-2 gamma_bar k)
  bool radius_underflow = false;
  std::vector<PropAEvaluation> evaluations;  // E_k, then E_k -/+ radius if representable
  // Markov polynomial inequality ingredient on [E_k - w, E_k + w].
  double markov_halfwidth = 0.0;
  double max_log_norm = 0.0;            // max of log ||Phi_n|| on the window grid
  double markov_log_derivative = 0.0;   // log of 2 n^2 / (2 w) * 2 max ||Phi_n||
  double perturbation_log_bound = 0.0;  // log(||Phi_n(E_k)|| + radius * derivative bound)
};

/// Evaluates the near-eigenvalue dip of ||Phi_2k||. Needs
/// gamma_bar >= gamma_k > 0, 0 < tau <= 1 and v.size() >= 2k.
PropAReport prop_a_check(std::span<const double> v, double E_k, std::size_t k, double gamma_k,
                         double gamma_bar, double tau, double markov_halfwidth = 1e-2,
                         std::size_t markov_grid = 201);

/// Rows (E, gamma_hat, std_err, n, trials, seed).
void write_lyapunov_csv(std::ostream& os, std::span<const LyapunovEstimate> rows);

}  // namespace anderson
