#pragma once

// Finite restrictions H_[a,b] of the Jacobi matrix with unit off-diagonals:
// determinants, Sturm counts, spectra by bisection, eigenvectors by inverse
// iteration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "anderson/interval.hpp"

namespace anderson {

/// Restriction of H to sites [offset, offset + size). Sites are 1-based, so
/// diag()[i] is the potential at site offset + i. Off-diagonals are 1.
class TridiagonalBlock {
public:
  TridiagonalBlock(std::size_t offset, std::vector<double> diag);

  std::size_t offset() const noexcept { return offset_; }
  std::size_t size() const noexcept { return diag_.size(); }
  std::size_t last_site() const noexcept { return offset_ + diag_.size() - 1; }
  std::span<const double> diag() const noexcept { return diag_; }

  /// Gershgorin enclosure of the spectrum.
  Interval gershgorin() const noexcept;

  /// y = H x.
  void apply(std::span<const double> x, std::span<double> y) const noexcept;

private:
  std::size_t offset_;
  std::vector<double> diag_;
};

/// Block with sites a..b of the potential v, where v[0] is the value at site 1.
TridiagonalBlock restrict_block(std::span<const double> v, std::size_t a, std::size_t b);

/// Block on the dyadic window [4^m, 2 * 4^m).
TridiagonalBlock dyadic_block(std::span<const double> v, unsigned m);

/// det(E - H_block) by the three-term recursion. May overflow for long blocks;
/// see char_poly_log.
double char_poly_value(const TridiagonalBlock& block, double E) noexcept;

struct LogDeterminant {
  int sign = 1;          // -1, 0 or +1
  double log_abs = 0.0;  // natural log of |det|; -inf when det == 0
};

/// Overflow-safe det(E - H_block): the recursion is rescaled by powers of two
/// whenever |d_j| leaves [2^-512, 2^512].
LogDeterminant char_poly_log(const TridiagonalBlock& block, double E) noexcept;

/// Number of eigenvalues <= E, from the signs of the LDL^T pivots of H - E.
std::size_t sturm_count(const TridiagonalBlock& block, double E) noexcept;

/// Sturm counts at many energies in one pass over the block.
void sturm_counts(const TridiagonalBlock& block, std::span<const double> energies,
                  std::span<std::size_t> counts) noexcept;

struct SpectrumResult {
  std::size_t offset = 1;
  std::vector<double> eigenvalues;  // ascending
  double tol = 0.0;                 // absolute accuracy of each eigenvalue
  double residual_tol = 0.0;        // bound on ||(H - E) psi||
  std::vector<std::vector<double>> eigenvectors;  // unit vectors, optional
  std::vector<double> residuals;                  // per eigenvector

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return !eigenvectors.empty(); }
};

/// All eigenvalues by Sturm bisection to absolute accuracy tol; eigenvectors
/// by inverse iteration when requested (residual <= 100 tol). Throws
/// PreconditionError if tol <= 0 and NumericError if inverse iteration does
/// not converge.
SpectrumResult spectrum(const TridiagonalBlock& block, double tol, bool want_vectors);

/// Eigenvalues only.
std::vector<double> eigenvalues_bisection(const TridiagonalBlock& block, double tol);

/// Visits eigenvectors one at a time without storing them all:
/// visit(index, psi, residual). Vectors of near-degenerate clusters are
/// orthogonalized against each other.
using EigenvectorVisitor =
    std::function<void(std::size_t index, std::span<const double> psi, double residual)>;
void visit_eigenvectors(const TridiagonalBlock& block, std::span<const double> eigenvalues,
                        double residual_tol, const EigenvectorVisitor& visit);

/// Smallest gap between consecutive eigenvalues. Needs >= 2 eigenvalues.
double min_spacing(const SpectrumResult& spec);
double min_spacing(std::span<const double> sorted_eigenvalues);

/// Rows (block_offset, block_length, index, eigenvalue).
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumResult> spectra);

}  // namespace anderson
