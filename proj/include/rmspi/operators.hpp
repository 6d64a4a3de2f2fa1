#pragma once
//
// Linear measurement operators A : R^{m x n} -> R^p, A(X)_i = <X, A_i>_F,
// the prior-weighted operator B(Z) = A(Qu^-1 Z Qv^-1) and empirical
// rank-restricted isometry estimates.
//
// Matrices are vectorized column-major throughout, so a dense operator is
// stored as the p x (m n) matrix whose i-th row is vec(A_i)^T.
//

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rmspi/matcore.hpp"

namespace rmspi {

enum class OperatorKind { gaussian, completion, custom };

inline std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::gaussian: return "gaussian";
    case OperatorKind::completion: return "completion";
    case OperatorKind::custom: return "custom";
  }
  return "unknown";
}

inline OperatorKind operator_kind_from_string(const std::string& s) {
  if (s == "gaussian") return OperatorKind::gaussian;
  if (s == "completion") return OperatorKind::completion;
  throw InvalidArgument("unknown operator kind '" + s + "'");
}

class MeasurementOperator {
 public:
  MeasurementOperator() = default;

  /// Dense operator from its p x (rows*cols) sensing matrix.
  static MeasurementOperator dense(Index rows, Index cols, Matrix sensing,
                                   OperatorKind kind = OperatorKind::custom) {
    detail::require(rows >= 1 && cols >= 1, "MeasurementOperator: empty matrix shape");
    detail::require(sensing.cols() == rows * cols, "MeasurementOperator: sensing width must be rows*cols");
    detail::require(sensing.rows() >= 1, "MeasurementOperator: need at least one measurement");
    require_finite(sensing, "MeasurementOperator");
    MeasurementOperator op;
    op.kind_ = kind;
    op.rows_ = rows;
    op.cols_ = cols;
    op.sensing_ = std::move(sensing);
    return op;
  }

  /// Dense operator from explicit measurement matrices A_1..A_p.
  static MeasurementOperator from_matrices(const std::vector<Matrix>& as) {
    detail::require(!as.empty(), "MeasurementOperator: need at least one measurement matrix");
    const Index rows = as.front().rows(), cols = as.front().cols();
    Matrix sensing(static_cast<Index>(as.size()), rows * cols);
    for (std::size_t i = 0; i < as.size(); ++i) {
      detail::require(as[i].rows() == rows && as[i].cols() == cols, "MeasurementOperator: inconsistent shapes");
      sensing.row(static_cast<Index>(i)) = as[i].reshaped().transpose();
    }
    return dense(rows, cols, std::move(sensing));
  }

  /// Entry-sampling operator; `linear` holds distinct column-major entry indices.
  static MeasurementOperator sampling(Index rows, Index cols, std::vector<Index> linear) {
    detail::require(rows >= 1 && cols >= 1, "MeasurementOperator: empty matrix shape");
    detail::require(!linear.empty(), "MeasurementOperator: need at least one sampled entry");
    std::vector<Index> sorted = linear;
    std::sort(sorted.begin(), sorted.end());
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "MeasurementOperator: sampled entries must be distinct");
    detail::require(sorted.front() >= 0 && sorted.back() < rows * cols,
                    "MeasurementOperator: sampled entry out of range");
    MeasurementOperator op;
    op.kind_ = OperatorKind::completion;
    op.rows_ = rows;
    op.cols_ = cols;
    op.entries_ = std::move(linear);
    return op;
  }

  /// Samples every entry once: the canonical-basis isometry.
  static MeasurementOperator full_identity(Index rows, Index cols) {
    std::vector<Index> all(static_cast<std::size_t>(rows * cols));
    std::iota(all.begin(), all.end(), Index{0});
    return sampling(rows, cols, std::move(all));
  }

  OperatorKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index measurements() const { return is_sampling() ? static_cast<Index>(entries_.size()) : sensing_.rows(); }
  bool is_sampling() const { return !entries_.empty(); }
  const Matrix& sensing() const { return sensing_; }
  const std::vector<Index>& entries() const { return entries_; }

  /// (row, col) of the i-th sampled entry.
  std::pair<Index, Index> entry(Index i) const {
    const Index lin = entries_[static_cast<std::size_t>(i)];
    return {lin % rows_, lin / rows_};
  }

  /// y_i = <X, A_i>_F.
  Vector apply(const Matrix& x) const {
    check_shape(x, "apply");
    if (is_sampling()) {
      Vector y(measurements());
      const double* data = x.data();
      for (std::size_t i = 0; i < entries_.size(); ++i) y(static_cast<Index>(i)) = data[entries_[i]];
      return y;
    }
    return sensing_ * x.reshaped();
  }

  /// sum_i y_i A_i.
  Matrix adjoint(const Vector& y) const {
    detail::require(y.size() == measurements(), "adjoint: measurement vector length mismatch");
    if (is_sampling()) {
      Matrix out = Matrix::Zero(rows_, cols_);
      double* data = out.data();
      for (std::size_t i = 0; i < entries_.size(); ++i) data[entries_[i]] = y(static_cast<Index>(i));
      return out;
    }
    Vector v = sensing_.transpose() * y;
    return v.reshaped(rows_, cols_);
  }

  /// Applies the operator to every column of `columns` (each a vectorized
  /// rows x cols matrix); returns p x columns.cols().
  Matrix apply_columns(const Matrix& columns) const {
    detail::require(columns.rows() == rows_ * cols_, "apply_columns: column length must be rows*cols");
    if (is_sampling()) {
      Matrix out(measurements(), columns.cols());
      for (std::size_t i = 0; i < entries_.size(); ++i) out.row(static_cast<Index>(i)) = columns.row(entries_[i]);
      return out;
    }
    return sensing_ * columns;
  }

  /// Same operator with every measurement scaled by `factor`.
  MeasurementOperator scaled(double factor) const {
    Matrix s = is_sampling() ? densified() : sensing_;
    return dense(rows_, cols_, factor * s);
  }

  /// The p x (rows*cols) sensing matrix, materialized for sampling operators.
  Matrix densified() const {
    if (!is_sampling()) return sensing_;
    Matrix s = Matrix::Zero(measurements(), rows_ * cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) s(static_cast<Index>(i), entries_[i]) = 1.0;
    return s;
  }

 private:
  void check_shape(const Matrix& x, const char* what) const {
    detail::require(x.rows() == rows_ && x.cols() == cols_,
                    std::string(what) + ": matrix shape does not match the operator");
  }

  OperatorKind kind_ = OperatorKind::custom;
  Index rows_ = 0;
  Index cols_ = 0;
  Matrix sensing_;
  std::vector<Index> entries_;
};

/// iid N(0, 1/p) entries, so that E||A(X)||^2 = ||X||_F^2.
inline MeasurementOperator make_gaussian(Index rows, Index cols, Index p, Rng& rng) {
  detail::require(p >= 1, "make_gaussian: need p >= 1");
  detail::require(rows >= 1 && cols >= 1, "make_gaussian: empty matrix shape");
  Matrix s = gaussian_matrix(p, rows * cols, rng, 1.0 / std::sqrt(static_cast<double>(p)));
  return MeasurementOperator::dense(rows, cols, std::move(s), OperatorKind::gaussian);
}

inline MeasurementOperator make_gaussian(Index n, Index p, Rng& rng) { return make_gaussian(n, n, p, rng); }

/// p distinct entries drawn uniformly without replacement (partial Fisher-Yates),
/// stored in ascending column-major order.
inline MeasurementOperator make_completion(Index rows, Index cols, Index p, Rng& rng) {
  detail::require(p >= 1, "make_completion: need p >= 1");
  detail::require(p <= rows * cols, "make_completion: cannot sample more entries than the matrix has");
  std::vector<Index> pool(static_cast<std::size_t>(rows * cols));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < p; ++i) {
    std::uniform_int_distribution<Index> pick(i, rows * cols - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(p));
  std::sort(pool.begin(), pool.end());
  return MeasurementOperator::sampling(rows, cols, std::move(pool));
}

inline MeasurementOperator make_completion(Index n, Index p, Rng& rng) { return make_completion(n, n, p, rng); }

/// B(Z) = A(Qu^-1 Z Qv^-1). Non-owning view: `base` must outlive it.
class WeightedOperator {
 public:
  WeightedOperator(const MeasurementOperator& base, Matrix qu_inv, Matrix qv_inv)
      : base_(&base), qu_inv_(std::move(qu_inv)), qv_inv_(std::move(qv_inv)) {
    detail::require(qu_inv_.rows() == base.rows() && qu_inv_.cols() == base.rows(),
                    "WeightedOperator: column weight has the wrong size");
    detail::require(qv_inv_.rows() == base.cols() && qv_inv_.cols() == base.cols(),
                    "WeightedOperator: row weight has the wrong size");
  }

  /// Unweighted view (Q = I).
  explicit WeightedOperator(const MeasurementOperator& base)
      : WeightedOperator(base, Matrix::Identity(base.rows(), base.rows()),
                         Matrix::Identity(base.cols(), base.cols())) {}

  const MeasurementOperator& base() const { return *base_; }
  const Matrix& qu_inv() const { return qu_inv_; }
  const Matrix& qv_inv() const { return qv_inv_; }
  Index rows() const { return base_->rows(); }
  Index cols() const { return base_->cols(); }
  Index measurements() const { return base_->measurements(); }

  /// Qu^-1 Z Qv^-1: maps the weighted variable back to the signal domain.
  Matrix unweight(const Matrix& z) const { return qu_inv_ * z * qv_inv_; }

  Vector apply(const Matrix& z) const {
    detail::require(z.rows() == rows() && z.cols() == cols(), "apply: matrix shape does not match the operator");
    return base_->apply(unweight(z));
  }

  /// Qu^-1 A*(y) Qv^-1 (both weights symmetric).
  Matrix adjoint(const Vector& y) const { return qu_inv_ * base_->adjoint(y) * qv_inv_; }

  /// Design matrix of B restricted to {U M V^T}: column a + ku*b is
  /// B(u_a v_b^T), so D vec(M) = B(U M V^T) with column-major vec(M).
  Matrix design(const Matrix& u, const Matrix& v) const {
    detail::require(u.rows() == rows() && v.rows() == cols(), "design: basis dimension mismatch");
    const Matrix wu = qu_inv_ * u;
    const Matrix wv = qv_inv_ * v;
    const Index ku = u.cols(), kv = v.cols();
    Matrix columns(rows() * cols(), ku * kv);
    for (Index b = 0; b < kv; ++b)
      for (Index a = 0; a < ku; ++a) columns.col(a + ku * b) = (wu.col(a) * wv.col(b).transpose()).reshaped();
    return base_->apply_columns(columns);
  }

 private:
  const MeasurementOperator* base_;
  Matrix qu_inv_;
  Matrix qv_inv_;
};

struct RipEstimate {
  Index rank = 0;
  Index samples = 0;
  double delta_hat = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
};

/// Random rank-r matrix U diag(s) V^T with Haar factors and s ~ U[lo, hi].
inline Matrix random_low_rank(Index rows, Index cols, Index r, Rng& rng, double lo, double hi) {
  const SubspaceBasis u = random_orthonormal(rows, r, rng);
  const SubspaceBasis v = random_orthonormal(cols, r, rng);
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector s(r);
  for (Index i = 0; i < r; ++i) s(i) = dist(rng);
  return u.matrix() * s.asDiagonal() * v.matrix().transpose();
}

/// Extremes of ||op(X)||^2 / ||X||_F^2 over the given samples.
template <typename Op>
RipEstimate rip_from_samples(const Op& op, const std::vector<Matrix>& samples, Index rank) {
  detail::require(!samples.empty(), "rip_from_samples: need at least one sample");
  RipEstimate est;
  est.rank = rank;
  est.samples = static_cast<Index>(samples.size());
  est.ratio_min = std::numeric_limits<double>::infinity();
  est.ratio_max = -std::numeric_limits<double>::infinity();
  for (const Matrix& x : samples) {
    const double denom = x.squaredNorm();
    detail::require(denom > 0.0, "rip_from_samples: zero sample");
    const double ratio = op.apply(x).squaredNorm() / denom;
    est.ratio_min = std::min(est.ratio_min, ratio);
    est.ratio_max = std::max(est.ratio_max, ratio);
  }
  est.delta_hat = std::max({1.0 - est.ratio_min, est.ratio_max - 1.0, 0.0});
  return est;
}

inline std::vector<Matrix> rip_samples(Index rows, Index cols, Index rank, Index samples, Rng& rng) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (Index i = 0; i < samples; ++i) out.push_back(random_low_rank(rows, cols, rank, rng, 0.1, 1.0));
  return out;
}

/// Monte-Carlo lower bound on the rank-`rank` isometry constant of `op`.
template <typename Op>
RipEstimate estimate_rip(const Op& op, Index rank, Index samples, Rng& rng) {
  detail::require(samples >= 1, "estimate_rip: need samples >= 1");
  detail::require(rank >= 1 && rank <= std::min(op.rows(), op.cols()), "estimate_rip: rank out of range");
  return rip_from_samples(op, rip_samples(op.rows(), op.cols(), rank, samples, rng), rank);
}

}  // namespace rmspi
