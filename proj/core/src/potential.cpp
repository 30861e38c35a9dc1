#include "anderson/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anderson/errors.hpp"

namespace anderson {

PotentialDistribution PotentialDistribution::uniform(double j_lo, double j_hi) {
  if (!(std::isfinite(j_lo) && std::isfinite(j_hi)) || !(j_hi > j_lo))
    throw InvalidDistribution("uniform law needs j_lo < j_hi, got [" +
                              std::to_string(j_lo) + ", " + std::to_string(j_hi) + "]");
  PotentialDistribution d;
  d.kind_ = DistributionKind::uniform;
  const double f = 1.0 / (j_hi - j_lo);
  d.nodes_ = {{j_lo, f}, {j_hi, f}};
  d.build_tables();
  return d;
}

PotentialDistribution PotentialDistribution::piecewise_linear(std::vector<DensityNode> nodes) {
  if (nodes.size() < 2) throw InvalidDistribution("piecewise-linear density needs >= 2 nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].x) || !std::isfinite(nodes[i].density) || nodes[i].density < 0)
      throw InvalidDistribution("density node " + std::to_string(i) + " is not finite and >= 0");
    if (i > 0 && !(nodes[i].x > nodes[i - 1].x))
      throw InvalidDistribution("density nodes must have strictly increasing x");
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    mass += 0.5 * (nodes[i].density + nodes[i - 1].density) * (nodes[i].x - nodes[i - 1].x);
  if (!(mass > 0)) throw InvalidDistribution("density integrates to zero");
  for (auto& n : nodes) n.density /= mass;

  PotentialDistribution d;
  d.kind_ = DistributionKind::piecewise_linear;
  d.nodes_ = std::move(nodes);
  d.build_tables();
  return d;
}

void PotentialDistribution::build_tables() {
  support_ = {nodes_.front().x, nodes_.back().x};
  cumulative_.assign(nodes_.size(), 0.0);
  double peak = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    peak = std::max(peak, nodes_[i].density);
    if (i > 0)
      cumulative_[i] = cumulative_[i - 1] + 0.5 * (nodes_[i].density + nodes_[i - 1].density) *
                                                (nodes_[i].x - nodes_[i - 1].x);
  }
  density_bound_ = std::max(1.0, peak);
}

double PotentialDistribution::density(double x) const noexcept {
  if (x < support_.lo || x > support_.hi) return 0.0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                             [](double v, const DensityNode& n) { return v < n.x; });
  if (it == nodes_.end()) return nodes_.back().density;
  if (it == nodes_.begin()) return nodes_.front().density;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (x - a.x) / (b.x - a.x);
  return a.density + w * (b.density - a.density);
}

double PotentialDistribution::cdf(double x) const noexcept {
  if (x <= support_.lo) return 0.0;
  if (x >= support_.hi) return 1.0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                             [](double v, const DensityNode& n) { return v < n.x; });
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const auto& a = nodes_[i];
  const auto& b = nodes_[i + 1];
  const double t = x - a.x;
  const double slope = (b.density - a.density) / (b.x - a.x);
  return std::min(1.0, cumulative_[i] + a.density * t + 0.5 * slope * t * t);
}

double PotentialDistribution::quantile(double u) const noexcept {
  if (kind_ == DistributionKind::uniform) return support_.lo + u * support_.length();
  const double total = cumulative_.back();
  const double target = std::clamp(u, 0.0, 1.0) * total;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  if (i + 1 >= nodes_.size()) i = nodes_.size() - 2;

  const auto& a = nodes_[i];
  const auto& b = nodes_[i + 1];
  const double h = b.x - a.x;
  const double slope = (b.density - a.density) / h;
  const double r = target - cumulative_[i];
  // Mass on [a.x, a.x + t] is a.density * t + slope * t^2 / 2 = r.
  const double disc = std::max(0.0, a.density * a.density + 2.0 * slope * r);
  const double denom = a.density + std::sqrt(disc);
  double t = denom > 0 ? 2.0 * r / denom : 0.0;
  t = std::clamp(t, 0.0, h);
  for (int iter = 0; iter < 3; ++iter) {
    const double g = a.density * t + 0.5 * slope * t * t - r;
    const double dg = a.density + slope * t;
    if (!(dg > 0) || std::abs(g) <= 1e-12 * std::max(total, 1e-300)) break;
    t = std::clamp(t - g / dg, 0.0, h);
  }
  return a.x + t;
}

double PotentialDistribution::lower_density_bound(double margin) const {
  const double lo = support_.lo + margin;
  const double hi = support_.hi - margin;
  if (!(margin > 0) || !(lo < hi))
    throw PreconditionError("lower_density_bound: margin must be positive and leave a nonempty subinterval");
  double m = std::min(density(lo), density(hi));
  for (const auto& n : nodes_)
    if (n.x > lo && n.x < hi) m = std::min(m, n.density);
  return m;
}

PotentialDistribution PotentialDistribution::shifted(double c) const {
  PotentialDistribution d = *this;
  for (auto& n : d.nodes_) n.x += c;
  d.build_tables();
  return d;
}

std::vector<double> sample_potential(const PotentialDistribution& dist, std::size_t n,
                                     std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw PreconditionError("sample_potential: n must be >= 1");
  std::vector<double> out(n);
  RandomStream rng(seed, stream);
  sample_potential(dist, rng, out);
  return out;
}

void sample_potential(const PotentialDistribution& dist, RandomStream& rng,
                      std::span<double> out) {
  for (auto& v : out) v = dist.sample(rng);
}

Interval essential_spectrum(const PotentialDistribution& dist) noexcept {
  return {dist.j_lo() - 2.0, dist.j_hi() + 2.0};
}

}  // namespace anderson
