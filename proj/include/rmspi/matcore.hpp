#pragma once
//
// Dense linear-algebra substrate: SVD, rank truncation, subspace geometry
// and seeded random generation. Real scalars only; the transpose plays the
// role of the Hermitian adjoint throughout.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmspi/error.hpp"

namespace rmspi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kRankDropTol = 1e-10;

inline double to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }
inline double to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

inline bool is_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const std::string& what) {
  detail::require(m.allFinite(), what + ": matrix has non-finite entries");
}

inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  "frobenius_inner: dimension mismatch");
  return (a.array() * b.array()).sum();
}

/// Matrix of iid N(0, stddev^2) entries, filled column-major from `rng`.
inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double stddev = 1.0) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

/// A matrix with orthonormal columns spanning a subspace of R^ambient_dim.
/// Rank zero (an n x 0 basis) is the empty subspace.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  /// Validates B^T B = I within kOrthonormalTol.
  explicit SubspaceBasis(Matrix basis) : basis_(std::move(basis)) {
    require_finite(basis_, "SubspaceBasis");
    detail::require(basis_.cols() <= basis_.rows(), "SubspaceBasis: rank exceeds ambient dimension");
    if (basis_.cols() > 0) {
      const double err =
          (basis_.transpose() * basis_ - Matrix::Identity(basis_.cols(), basis_.cols()))
              .cwiseAbs()
              .maxCoeff();
      detail::require(err <= kOrthonormalTol,
                      "SubspaceBasis: columns are not orthonormal (error " + std::to_string(err) + ")");
    }
  }

  static SubspaceBasis empty(Index ambient_dim) { return SubspaceBasis(Matrix(ambient_dim, 0)); }

  Index ambient_dim() const { return basis_.rows(); }
  Index rank() const { return basis_.cols(); }
  bool is_empty() const { return basis_.cols() == 0; }
  const Matrix& matrix() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }

  /// First k columns.
  SubspaceBasis leading(Index k) const {
    detail::require(k >= 0 && k <= rank(), "SubspaceBasis::leading: k out of range");
    return SubspaceBasis(basis_.leftCols(k));
  }

 private:
  Matrix basis_;
};

struct SvdResult {
  SubspaceBasis left;
  Vector singular_values;  // nonincreasing
  SubspaceBasis right;

  Matrix reconstruct() const {
    return left.matrix() * singular_values.asDiagonal() * right.matrix().transpose();
  }
};

/// Thin SVD with min(rows, cols) triplets.
inline SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  if (m.size() == 0) {
    return {SubspaceBasis(Matrix(m.rows(), 0)), Vector(0), SubspaceBasis(Matrix(m.cols(), 0))};
  }
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalError("svd: decomposition failed to converge");
  return {SubspaceBasis(dec.matrixU()), dec.singularValues(), SubspaceBasis(dec.matrixV())};
}

/// Best rank-r approximation in Frobenius norm (Eckart-Young).
inline Matrix truncate_rank(const Matrix& m, Index r) {
  detail::require(r >= 0 && r <= std::min(m.rows(), m.cols()), "truncate_rank: rank out of range");
  if (r == 0) return Matrix::Zero(m.rows(), m.cols());
  const SvdResult s = svd(m);
  return s.left.matrix().leftCols(r) * s.singular_values.head(r).asDiagonal() *
         s.right.matrix().leftCols(r).transpose();
}

/// Orthonormal basis of the column space of `m` by twice-iterated modified
/// Gram-Schmidt. Columns whose residual norm falls below kRankDropTol are
/// dropped, so the result is rank-revealing and may be empty.
inline SubspaceBasis orthonormalize(const Matrix& m) {
  require_finite(m, "orthonormalize");
  const Index n = m.rows();
  Matrix q(n, m.cols());
  Index k = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    Vector v = m.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < k; ++i) v -= q.col(i).dot(v) * q.col(i);
    const double norm = v.norm();
    if (norm < kRankDropTol) continue;
    q.col(k++) = v / norm;
  }
  return SubspaceBasis(q.leftCols(k));
}

/// Orthonormal basis of the orthogonal complement of `s`.
inline SubspaceBasis complement(const SubspaceBasis& s) {
  const Index n = s.ambient_dim();
  if (s.is_empty()) return SubspaceBasis(Matrix::Identity(n, n));
  Matrix full = Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(s.matrix());
  full = qr.householderQ() * full;
  return SubspaceBasis(full.rightCols(n - s.rank()));
}

/// Haar-distributed n x r orthonormal frame: QR of a Gaussian matrix with
/// the sign ambiguity of R's diagonal removed.
inline SubspaceBasis random_orthonormal(Index n, Index r, Rng& rng) {
  detail::require(r >= 0 && r <= n, "random_orthonormal: need r <= n");
  if (r == 0) return SubspaceBasis::empty(n);
  const Matrix g = gaussian_matrix(n, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  const Matrix& packed = qr.matrixQR();
  for (Index j = 0; j < r; ++j)
    if (packed(j, j) < 0) q.col(j) = -q.col(j);
  return SubspaceBasis(std::move(q));
}

/// Principal angles in degrees, nondecreasing, length min(rank1, rank2).
/// Angles below 45 degrees come from the sines (singular values of the part
/// of the smaller basis orthogonal to the larger), the rest from the cosines.
inline std::vector<double> principal_angles(const SubspaceBasis& s1, const SubspaceBasis& s2) {
  detail::require(s1.ambient_dim() == s2.ambient_dim(), "principal_angles: ambient dimension mismatch");
  const SubspaceBasis& big = s1.rank() >= s2.rank() ? s1 : s2;
  const SubspaceBasis& small = s1.rank() >= s2.rank() ? s2 : s1;
  const Index k = small.rank();
  std::vector<double> angles;
  if (k == 0) return angles;
  const Matrix cross = big.matrix().transpose() * small.matrix();
  const Vector cosines = Eigen::JacobiSVD<Matrix>(cross).singularValues();  // descending
  const Matrix resid = small.matrix() - big.matrix() * cross;
  const Vector sines = Eigen::JacobiSVD<Matrix>(resid).singularValues();    // descending
  angles.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const double from_cos = std::acos(std::clamp(cosines(i), 0.0, 1.0));
    const double from_sin = std::asin(std::clamp(sines(k - 1 - i), 0.0, 1.0));
    angles.push_back(to_degrees(from_cos < std::numbers::pi / 4 ? from_sin : from_cos));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

/// Rotates each basis vector u_i toward its own direction q_i of the
/// orthogonal complement: u~_i = cos(theta_i) u_i + sin(theta_i) q_i. The q_i
/// are mutually orthonormal, so the principal angles between `s` and the
/// result are exactly `angles_deg`.
inline SubspaceBasis perturb_subspace(const SubspaceBasis& s, std::span<const double> angles_deg, Rng& rng) {
  const Index n = s.ambient_dim();
  const Index r = s.rank();
  detail::require(static_cast<Index>(angles_deg.size()) == r, "perturb_subspace: need one angle per basis vector");
  detail::require(n >= 2 * r, "perturb_subspace: ambient dimension must be at least twice the rank");
  for (double a : angles_deg)
    detail::require(a >= 0.0 && a <= 90.0, "perturb_subspace: angles must lie in [0, 90] degrees");
  if (r == 0) return s;

  const Matrix& u = s.matrix();
  Matrix g = gaussian_matrix(n, r, rng);
  for (int pass = 0; pass < 2; ++pass) g -= u * (u.transpose() * g);
  const SubspaceBasis dirs = orthonormalize(g);
  if (dirs.rank() != r) throw NumericalError("perturb_subspace: degenerate complement draw");

  Matrix out(n, r);
  for (Index i = 0; i < r; ++i) {
    const double t = to_radians(angles_deg[static_cast<std::size_t>(i)]);
    out.col(i) = std::cos(t) * u.col(i) + std::sin(t) * dirs.matrix().col(i);
  }
  return SubspaceBasis(std::move(out));
}

}  // namespace rmspi
