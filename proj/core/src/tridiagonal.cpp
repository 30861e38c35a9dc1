#include "anderson/tridiagonal.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "anderson/csv.hpp"
#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

namespace anderson {

namespace {

constexpr double kPivMin = DBL_MIN;
constexpr int kBatch = 8;
constexpr double kLn2 = 0.69314718055994530942;

// Inverse-iteration start vectors come from a fixed private seed so that
// eigenvectors are a deterministic function of the block.
constexpr std::uint64_t kInverseIterationSeed = 0x5eed'1a7e'd0c5'0001ULL;

inline double guard(double q) noexcept { return std::abs(q) < kPivMin ? -kPivMin : q; }

}  // namespace

TridiagonalBlock::TridiagonalBlock(std::size_t offset, std::vector<double> diag)
    : offset_(offset), diag_(std::move(diag)) {
  if (offset_ < 1) throw IndexError("TridiagonalBlock: sites are 1-based, offset must be >= 1");
  if (diag_.empty()) throw PreconditionError("TridiagonalBlock: length must be >= 1");
}

Interval TridiagonalBlock::gershgorin() const noexcept {
  const auto [mn, mx] = std::minmax_element(diag_.begin(), diag_.end());
  const double radius = diag_.size() == 1 ? 0.0 : 2.0;
  return {*mn - radius, *mx + radius};
}

void TridiagonalBlock::apply(std::span<const double> x, std::span<double> y) const noexcept {
  const std::size_t n = diag_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag_[i] * x[i];
    if (i > 0) s += x[i - 1];
    if (i + 1 < n) s += x[i + 1];
    y[i] = s;
  }
}

TridiagonalBlock restrict_block(std::span<const double> v, std::size_t a, std::size_t b) {
  if (a < 1 || a > b || b > v.size())
    throw IndexError("restrict: need 1 <= a <= b <= " + std::to_string(v.size()) + ", got a=" +
                     std::to_string(a) + " b=" + std::to_string(b));
  return TridiagonalBlock(a, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(a - 1),
                                                 v.begin() + static_cast<std::ptrdiff_t>(b)));
}

TridiagonalBlock dyadic_block(std::span<const double> v, unsigned m) {
  if (m > 30) throw PreconditionError("dyadic_block: level too large");
  const std::size_t start = std::size_t{1} << (2 * m);
  const std::size_t last = 2 * start - 1;
  if (v.size() < last)
    throw IndexError("dyadic_block: level " + std::to_string(m) + " needs " +
                     std::to_string(last) + " sites, potential has " + std::to_string(v.size()));
  return restrict_block(v, start, last);
}

double char_poly_value(const TridiagonalBlock& block, double E) noexcept {
  double prev = 0.0;
  double cur = 1.0;
  for (double vj : block.diag()) {
    const double next = (E - vj) * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

LogDeterminant char_poly_log(const TridiagonalBlock& block, double E) noexcept {
  constexpr double kHi = 0x1.0p512;
  constexpr double kLo = 0x1.0p-512;
  double prev = 0.0;
  double cur = 1.0;
  long long exponent = 0;
  for (double vj : block.diag()) {
    const double next = (E - vj) * cur - prev;
    prev = cur;
    cur = next;
    const double big = std::max(std::abs(cur), std::abs(prev));
    if (big > kHi || (big < kLo && big > 0)) {
      int e = 0;
      std::frexp(big, &e);
      cur = std::ldexp(cur, -e);
      prev = std::ldexp(prev, -e);
      exponent += e;
    }
  }
  if (cur == 0.0) return {0, -std::numeric_limits<double>::infinity()};
  return {cur > 0 ? 1 : -1, std::log(std::abs(cur)) + static_cast<double>(exponent) * kLn2};
}

std::size_t sturm_count(const TridiagonalBlock& block, double E) noexcept {
  const auto d = block.diag();
  double q = guard(d[0] - E);
  std::size_t count = q < 0;
  for (std::size_t j = 1; j < d.size(); ++j) {
    q = guard((d[j] - E) - 1.0 / q);
    count += q < 0;
  }
  return count;
}

void sturm_counts(const TridiagonalBlock& block, std::span<const double> energies,
                  std::span<std::size_t> counts) noexcept {
  const auto d = block.diag();
  const std::size_t n = d.size();
  std::size_t i = 0;
  for (; i + kBatch <= energies.size(); i += kBatch) {
    double e[kBatch], q[kBatch];
    std::size_t c[kBatch];
    for (int l = 0; l < kBatch; ++l) {
      e[l] = energies[i + l];
      q[l] = guard(d[0] - e[l]);
      c[l] = q[l] < 0;
    }
    for (std::size_t j = 1; j < n; ++j) {
      const double dj = d[j];
      for (int l = 0; l < kBatch; ++l) {
        q[l] = guard((dj - e[l]) - 1.0 / q[l]);
        c[l] += q[l] < 0;
      }
    }
    for (int l = 0; l < kBatch; ++l) counts[i + l] = c[l];
  }
  for (; i < energies.size(); ++i) counts[i] = sturm_count(block, energies[i]);
}

std::vector<double> eigenvalues_bisection(const TridiagonalBlock& block, double tol) {
  if (!(tol > 0)) throw PreconditionError("spectrum: tol must be > 0");
  const std::size_t n = block.size();
  const Interval g = block.gershgorin();
  // Widen slightly so the Sturm counts at the ends are exactly 0 and n.
  const double pad = 4 * DBL_EPSILON * std::max({1.0, std::abs(g.lo), std::abs(g.hi)});
  std::vector<double> lo(n, g.lo - pad), hi(n, g.hi + pad);
  std::vector<char> done(n, 0);
  std::vector<std::size_t> active, counts;
  std::vector<double> mids;

  for (;;) {
    active.clear();
    mids.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      const double width = hi[j] - lo[j];
      const double floor = 2 * DBL_EPSILON * std::max(std::abs(lo[j]), std::abs(hi[j]));
      const double mid = lo[j] + 0.5 * width;
      if (width <= std::max(tol, floor) || mid <= lo[j] || mid >= hi[j]) {
        done[j] = 1;
        continue;
      }
      active.push_back(j);
      mids.push_back(mid);
    }
    if (active.empty()) break;
    counts.resize(mids.size());
    sturm_counts(block, mids, counts);
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t j = active[a];
      const std::size_t c = counts[a];
      // lambda_i <= mid for i < c, lambda_i > mid for i >= c.
      if (c > j) hi[j] = std::min(hi[j], mids[a]);
      else lo[j] = std::max(lo[j], mids[a]);
      if (c > 0) hi[c - 1] = std::min(hi[c - 1], mids[a]);
      if (c < n) lo[c] = std::max(lo[c], mids[a]);
    }
    for (std::size_t j = 1; j < n; ++j) lo[j] = std::max(lo[j], lo[j - 1]);
    for (std::size_t j = n - 1; j-- > 0;) hi[j] = std::min(hi[j], hi[j + 1]);
  }

  std::vector<double> ev(n);
  for (std::size_t j = 0; j < n; ++j) ev[j] = lo[j] + 0.5 * (hi[j] - lo[j]);
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

// LU factorization with partial pivoting of the tridiagonal matrix H - shift,
// in the layout of LAPACK dgttrf: U has diagonal d, super-diagonals du, du2.
class ShiftedTridiagonalLU {
public:
  ShiftedTridiagonalLU(std::span<const double> diag, double shift, double scale) {
    const std::size_t n = diag.size();
    d_.resize(n);
    for (std::size_t i = 0; i < n; ++i) d_[i] = diag[i] - shift;
    dl_.assign(n > 0 ? n - 1 : 0, 1.0);
    du_.assign(n > 0 ? n - 1 : 0, 1.0);
    du2_.assign(n > 1 ? n - 2 : 0, 0.0);
    swap_.assign(n > 0 ? n - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        const double l = d_[i] != 0.0 ? dl_[i] / d_[i] : 0.0;
        dl_[i] = l;
        d_[i + 1] -= l * du_[i];
      } else {
        const double l = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = l;
        const double tmp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = tmp - l * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -l * du_[i + 1];
        }
        swap_[i] = 1;
      }
    }
    // An exactly singular shift is the expected case; perturb tiny pivots.
    const double tiny = DBL_EPSILON * scale;
    for (auto& p : d_)
      if (std::abs(p) < tiny) p = std::copysign(tiny, p == 0.0 ? 1.0 : p);
  }

  void solve(std::span<double> b) const noexcept {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swap_[i]) {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl_[i] * b[i];
      } else {
        b[i + 1] -= dl_[i] * b[i];
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      double s = b[k];
      if (k + 1 < n) s -= du_[k] * b[k + 1];
      if (k + 2 < n) s -= du2_[k] * b[k + 2];
      b[k] = s / d_[k];
    }
  }

private:
  std::vector<double> d_, dl_, du_, du2_;
  std::vector<char> swap_;
};

double norm2(std::span<const double> x) noexcept {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

double residual_norm(const TridiagonalBlock& block, std::span<const double> psi, double E,
                     std::vector<double>& work) {
  work.resize(psi.size());
  block.apply(psi, work);
  for (std::size_t i = 0; i < psi.size(); ++i) work[i] -= E * psi[i];
  return norm2(work);
}

}  // namespace

void visit_eigenvectors(const TridiagonalBlock& block, std::span<const double> eigenvalues,
                        double residual_tol, const EigenvectorVisitor& visit) {
  const std::size_t n = block.size();
  const Interval g = block.gershgorin();
  const double scale = std::max({1.0, std::abs(g.lo), std::abs(g.hi)});
  const double cluster_gap = 1e-5 * scale;
  constexpr int kMaxIterations = 8;
  constexpr int kMaxRestarts = 4;

  std::vector<std::vector<double>> cluster;  // vectors of the current cluster
  std::vector<double> x(n), work;

  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double E = eigenvalues[j];
    if (j == 0 || E - eigenvalues[j - 1] > cluster_gap) cluster.clear();

    ShiftedTridiagonalLU lu(block.diag(), E, scale);
    bool converged = false;
    double residual = 0.0;
    for (int attempt = 0; attempt <= kMaxRestarts && !converged; ++attempt) {
      RandomStream rng(kInverseIterationSeed,
                       streams::kInverseIteration + (static_cast<std::uint64_t>(attempt) << 40) + j);
      for (auto& xi : x) xi = rng.uniform() - 0.5;
      for (int it = 0; it < kMaxIterations; ++it) {
        lu.solve(x);
        for (const auto& u : cluster) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += u[i] * x[i];
          for (std::size_t i = 0; i < n; ++i) x[i] -= dot * u[i];
        }
        const double nrm = norm2(x);
        if (!(nrm > 0) || !std::isfinite(nrm)) break;
        for (auto& xi : x) xi /= nrm;
        if (it >= 1) {
          residual = residual_norm(block, x, E, work);
          if (residual <= residual_tol) {
            converged = true;
            break;
          }
        }
      }
    }
    if (!converged)
      throw NumericError("inverse iteration did not converge for eigenvalue index " +
                             std::to_string(j),
                         j);
    // Fix the sign so the largest component is positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(x[i]) > std::abs(x[arg])) arg = i;
    if (x[arg] < 0)
      for (auto& xi : x) xi = -xi;
    visit(j, x, residual);
    cluster.push_back(x);
  }
}

SpectrumResult spectrum(const TridiagonalBlock& block, double tol, bool want_vectors) {
  SpectrumResult r;
  r.offset = block.offset();
  r.eigenvalues = eigenvalues_bisection(block, tol);
  const Interval g = block.gershgorin();
  const double floor = 4 * DBL_EPSILON * std::max({1.0, std::abs(g.lo), std::abs(g.hi)});
  r.tol = std::max(tol, floor);
  r.residual_tol = 100.0 * r.tol;
  if (want_vectors) {
    r.eigenvectors.resize(block.size());
    r.residuals.resize(block.size());
    visit_eigenvectors(block, r.eigenvalues, r.residual_tol,
                       [&](std::size_t j, std::span<const double> psi, double res) {
                         r.eigenvectors[j].assign(psi.begin(), psi.end());
                         r.residuals[j] = res;
                       });
  }
  return r;
}

double min_spacing(std::span<const double> ev) {
  if (ev.size() < 2) throw PreconditionError("min_spacing: need at least 2 eigenvalues");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ev.size(); ++i) m = std::min(m, ev[i] - ev[i - 1]);
  return m;
}

double min_spacing(const SpectrumResult& spec) { return min_spacing(spec.eigenvalues); }

void write_spectrum_csv(std::ostream& os, std::span<const SpectrumResult> spectra) {
  CsvWriter csv(os, {"block_offset", "block_length", "index", "eigenvalue"});
  for (const auto& s : spectra) {
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      csv << s.offset << s.eigenvalues.size() << i << s.eigenvalues[i];
      csv.end_row();
    }
  }
}

}  // namespace anderson
