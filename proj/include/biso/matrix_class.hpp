#ifndef BISO_MATRIX_CLASS_HPP
#define BISO_MATRIX_CLASS_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"
#include "permutation.hpp"

namespace biso {

inline constexpr double kMembershipTol = 1e-9;

// out(i, j) = M(pi(i), sigma(j)).
inline DenseMatrix permute_matrix(const DenseMatrix& m, const Permutation& pi,
                                  const Permutation& sigma) {
  if (pi.size() != m.rows() || sigma.size() != m.cols())
    throw std::invalid_argument("permute_matrix: permutation lengths do not match matrix dims");
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(pi(i));
    auto dst = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[sigma(j)];
  }
  return out;
}

// The matrix seen in latent order: entry (pi(i), sigma(j)) of the result is
// m(i, j). A matrix M lies in C_BISO(pi, sigma) iff latent_view(M, pi, sigma)
// is bivariate isotonic.
inline DenseMatrix latent_view(const DenseMatrix& m, const Permutation& pi,
                               const Permutation& sigma) {
  return permute_matrix(m, pi.inverse(), sigma.inverse());
}

inline bool is_biso(const DenseMatrix& m, double tol = kMembershipTol) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double x = m(i, j);
      if (x < -tol || x > 1.0 + tol) return false;
      if (j + 1 < m.cols() && m(i, j + 1) < x - tol) return false;
      if (i + 1 < m.rows() && m(i + 1, j) < x - tol) return false;
    }
  }
  return true;
}

// Strong stochastic transitivity: M + M^T = 11^T and, after ordering rows and
// columns by decreasing row sum, rows are non-decreasing and columns
// non-increasing, with entries in [0, 1].
inline bool is_sst(const DenseMatrix& m, double tol = kMembershipTol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("is_sst: matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(m(i, j) + m(j, i) - 1.0) > tol) return false;

  auto sums = m.row_sums();
  for (auto& s : sums) s = -s;
  const Permutation by_strength = ranks_ascending(sums);
  const DenseMatrix sorted = latent_view(m, by_strength, by_strength);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double x = sorted(i, j);
      if (x < -tol || x > 1.0 + tol) return false;
      if (j + 1 < n && sorted(i, j + 1) < x - tol) return false;
      if (i + 1 < n && sorted(i + 1, j) > x + tol) return false;
    }
  }
  return true;
}

enum class MatrixClass { biso, biso_permuted, perm_rc, perm_r, sst };

struct MatrixClassTag {
  MatrixClass kind = MatrixClass::biso;
  // Only used by biso_permuted.
  std::optional<Permutation> pi;
  std::optional<Permutation> sigma;
};

// Membership in the tagged class. For the permuted classes the latent order
// is recovered by sorting row (and column) sums: inside C_BISO two rows with
// equal sums are equal, so any sum-sorting order is a witness.
inline bool belongs_to(const DenseMatrix& m, const MatrixClassTag& tag,
                       double tol = kMembershipTol) {
  switch (tag.kind) {
    case MatrixClass::biso:
      return is_biso(m, tol);
    case MatrixClass::biso_permuted:
      if (!tag.pi || !tag.sigma)
        throw std::invalid_argument("belongs_to: biso_permuted needs both permutations");
      return is_biso(latent_view(m, *tag.pi, *tag.sigma), tol);
    case MatrixClass::perm_rc:
      return is_biso(latent_view(m, ranks_ascending(m.row_sums()), ranks_ascending(m.col_sums())),
                     tol);
    case MatrixClass::perm_r:
      return is_biso(
          latent_view(m, ranks_ascending(m.row_sums()), Permutation::identity(m.cols())), tol);
    case MatrixClass::sst:
      if (m.rows() != m.cols()) throw std::invalid_argument("belongs_to: SST requires n1 = n2");
      return is_sst(m, tol);
  }
  return false;
}

}  // namespace biso

#endif  // BISO_MATRIX_CLASS_HPP
