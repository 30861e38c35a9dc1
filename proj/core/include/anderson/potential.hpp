#pragma once

// I.i.d. potential laws supported on a compact interval J with a bounded
// density that stays away from zero inside J.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "anderson/interval.hpp"
#include "anderson/rng.hpp"

namespace anderson {

enum class DistributionKind { uniform, piecewise_linear };

struct DensityNode {
  double x = 0.0;
  double density = 0.0;
};

class PotentialDistribution {
public:
  /// Uniform law on [j_lo, j_hi]. Throws InvalidDistribution if j_hi <= j_lo.
  static PotentialDistribution uniform(double j_lo, double j_hi);

  /// Continuous piecewise-linear density through `nodes` (x strictly
  /// increasing, values >= 0, at least one positive). The support is
  /// [nodes.front().x, nodes.back().x]; the values are rescaled so that the
  /// density integrates to one.
  static PotentialDistribution piecewise_linear(std::vector<DensityNode> nodes);

  DistributionKind kind() const noexcept { return kind_; }
  double j_lo() const noexcept { return support_.lo; }
  double j_hi() const noexcept { return support_.hi; }
  Interval support() const noexcept { return support_; }

  /// A >= 1 with density <= A on J.
  double density_bound() const noexcept { return density_bound_; }

  /// Normalized nodes; for the uniform law the two endpoints.
  const std::vector<DensityNode>& nodes() const noexcept { return nodes_; }

  double density(double x) const noexcept;
  double cdf(double x) const noexcept;
  double quantile(double u) const noexcept;

  /// Infimum of the density on [j_lo + margin, j_hi - margin]. This is the
  /// lower density bound on proper subintervals, exposed as a diagnostic.
  double lower_density_bound(double margin) const;

  /// Law of v + c.
  PotentialDistribution shifted(double c) const;

  double sample(RandomStream& rng) const noexcept { return quantile(rng.uniform()); }

private:
  PotentialDistribution() = default;
  void build_tables();

  DistributionKind kind_ = DistributionKind::uniform;
  Interval support_;
  double density_bound_ = 1.0;
  std::vector<DensityNode> nodes_;
  std::vector<double> cumulative_;  // mass to the left of each node
};

/// n i.i.d. samples from stream (seed, stream). Identical arguments give a
/// bit-identical sequence.
std::vector<double> sample_potential(const PotentialDistribution& dist, std::size_t n,
                                     std::uint64_t seed, std::uint64_t stream);

/// Fills `out` from an existing stream.
void sample_potential(const PotentialDistribution& dist, RandomStream& rng,
                      std::span<double> out);

/// The essential spectrum [-2, 2] + J.
Interval essential_spectrum(const PotentialDistribution& dist) noexcept;

}  // namespace anderson
