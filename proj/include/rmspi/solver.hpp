#pragma once
//
// Greedy low-rank recovery with subspace priors (RMSPI / GRMSPI) and the
// unweighted ADMiRA baseline. The loop runs in the weighted variable
// Z = Qu X Qv, measured through B(Z) = A(Qu^-1 Z Qv^-1):
//
//   G     = Qu^-1 A*(y - A(X_rec)) Qv^-1      correlation proxy
//   Psi'  = top-2r singular pairs of G        support identification
//   Psi~  = Psi' u Psi_hat                    merge (<= 3r per side)
//   X~    = argmin ||y - B(U M V^T)||         least squares on the support
//   X_hat = rank-r truncation of X~           Psi_hat = its singular pairs
//   X_rec = Qu^-1 X_hat Qv^-1
//
// A support is a pair of orthonormal bases (U, V) standing for the matrix
// space {U M V^T : M arbitrary}.
//

#include <optional>
#include <string>
#include <vector>

#include "rmspi/matcore.hpp"
#include "rmspi/operators.hpp"
#include "rmspi/weighting.hpp"

namespace rmspi {

enum class Method { admira, rmspi, grmspi };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::admira: return "admira";
    case Method::rmspi: return "rmspi";
    case Method::grmspi: return "grmspi";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  if (s == "admira") return Method::admira;
  if (s == "rmspi") return Method::rmspi;
  if (s == "grmspi") return Method::grmspi;
  throw InvalidArgument("unknown solver '" + s + "'");
}

struct Support {
  SubspaceBasis left;
  SubspaceBasis right;

  static Support empty(Index rows, Index cols) { return {SubspaceBasis::empty(rows), SubspaceBasis::empty(cols)}; }
  bool is_empty() const { return left.is_empty() || right.is_empty(); }

  /// Orthogonal projection of `m` onto {U M V^T}.
  Matrix project(const Matrix& m) const {
    const Matrix& u = left.matrix();
    const Matrix& v = right.matrix();
    return u * (u.transpose() * m * v) * v.transpose();
  }
};

/// Top-k singular pairs of the proxy. Numerically-zero singular values are
/// skipped, so an all-zero proxy gives an empty support.
inline Support identify_support(const Matrix& proxy, Index k) {
  detail::require(k >= 1, "identify_support: need k >= 1");
  const SvdResult s = svd(proxy);
  const double top = s.singular_values.size() > 0 ? s.singular_values(0) : 0.0;
  const double floor = top * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(proxy.rows(), proxy.cols()));
  Index keep = 0;
  while (keep < std::min(k, s.singular_values.size()) && s.singular_values(keep) > floor && top > 0.0) ++keep;
  return {s.left.leading(keep), s.right.leading(keep)};
}

/// Basis pair spanning both supports; `fresh` directions come first.
inline Support merge_support(const Support& fresh, const Support& prev) {
  detail::require(fresh.left.ambient_dim() == prev.left.ambient_dim() &&
                      fresh.right.ambient_dim() == prev.right.ambient_dim(),
                  "merge_support: ambient dimension mismatch");
  auto join = [](const SubspaceBasis& a, const SubspaceBasis& b) {
    Matrix both(a.ambient_dim(), a.rank() + b.rank());
    both << a.matrix(), b.matrix();
    return orthonormalize(both);
  };
  return {join(fresh.left, prev.left), join(fresh.right, prev.right)};
}

/// Minimum-norm least squares over {U M V^T}: solves D vec(M) ~ y with the
/// p x (ku kv) design D of B on the support, via an SVD pseudo-inverse.
inline Matrix least_squares_on_support(const WeightedOperator& b, const Vector& y, const Support& s) {
  detail::require(y.size() == b.measurements(), "least_squares_on_support: measurement length mismatch");
  detail::require(!s.is_empty(), "least_squares_on_support: empty support");
  const Matrix& u = s.left.matrix();
  const Matrix& v = s.right.matrix();
  const Matrix design = b.design(u, v);
  Eigen::BDCSVD<Matrix> dec(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalError("least_squares_on_support: SVD failed");
  const Vector coeffs = dec.solve(y);
  if (!coeffs.allFinite()) throw NumericalError("least_squares_on_support: non-finite solution");
  const Matrix m = coeffs.reshaped(u.cols(), v.cols());
  return u * m * v.transpose();
}

struct Weighting {
  Method method = Method::admira;
  std::optional<WeightOperator> column;  // Q_U~
  std::optional<WeightOperator> row;     // Q_V~

  static Weighting none() { return {}; }
  static Weighting with(Method m, WeightOperator column_op, WeightOperator row_op) {
    return {m, std::move(column_op), std::move(row_op)};
  }
  bool is_weighted() const { return column.has_value(); }
};

struct SolverConfig {
  Index rank = 1;
  int max_iterations = 20;
  double residual_tolerance = 1e-6;  // relative ||y - A(X_rec)|| / ||y||
  Weighting weighting;

  void validate() const {
    detail::require(rank >= 1, "SolverConfig: rank must be >= 1");
    detail::require(max_iterations >= 1, "SolverConfig: max_iterations must be >= 1");
    detail::require(residual_tolerance > 0.0, "SolverConfig: residual_tolerance must be > 0");
    detail::require(weighting.column.has_value() == weighting.row.has_value(),
                    "SolverConfig: column and row weights must be given together");
  }
};

enum class StopReason { tolerance, max_iter, stagnation };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iter: return "max_iter";
    case StopReason::stagnation: return "stagnation";
  }
  return "unknown";
}

struct IterationRecord {
  double residual = 0.0;  // relative measurement residual after the iteration
  Index merged_left = 0, merged_right = 0;
  Index support_left = 0, support_right = 0;
  Matrix estimate;  // de-weighted X_rec
  Matrix weighted;  // X_hat, before de-weighting
};

struct SolverRun {
  Matrix estimate;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  StopReason stop_reason = StopReason::max_iter;
};

inline constexpr double kStagnationTol = 1e-10;
inline constexpr int kStagnationWindow = 3;

inline SolverRun solve(const MeasurementOperator& a, const Vector& y, const SolverConfig& cfg) {
  cfg.validate();
  const Index rows = a.rows(), cols = a.cols();
  detail::require(y.size() == a.measurements(), "solve: measurement length does not match the operator");
  detail::require(cfg.rank <= std::min(rows, cols), "solve: rank exceeds the matrix dimensions");
  detail::require(y.allFinite(), "solve: measurements contain non-finite values");

  const Weighting& w = cfg.weighting;
  if (w.is_weighted()) {
    detail::require(w.column->dim() == rows && w.row->dim() == cols, "solve: weight operator size mismatch");
  }
  const WeightedOperator b = w.is_weighted() ? WeightedOperator(a, w.column->q_inv, w.row->q_inv)
                                             : WeightedOperator(a);

  SolverRun run;
  run.estimate = Matrix::Zero(rows, cols);
  const double y_norm = y.norm();
  if (y_norm == 0.0) {
    run.iterations = 1;
    run.stop_reason = StopReason::tolerance;
    run.trace.push_back({0.0, 0, 0, 0, 0, run.estimate, run.estimate});
    return run;
  }

  Support kept = Support::empty(rows, cols);
  Vector residual = y;  // X_rec = 0
  double prev_res = 1.0;
  int flat = 0;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const Matrix proxy = b.adjoint(residual);
    const Support fresh = identify_support(proxy, 2 * cfg.rank);
    if (fresh.is_empty()) {
      run.stop_reason = StopReason::stagnation;
      break;
    }
    const Support merged = merge_support(fresh, kept);
    const Matrix x_ls = least_squares_on_support(b, y, merged);

    const SvdResult s = svd(x_ls);
    Index keep = 0;
    while (keep < std::min<Index>(cfg.rank, s.singular_values.size()) && s.singular_values(keep) > 0.0) ++keep;
    const Matrix x_hat = s.left.matrix().leftCols(keep) * s.singular_values.head(keep).asDiagonal() *
                         s.right.matrix().leftCols(keep).transpose();
    kept = {s.left.leading(keep), s.right.leading(keep)};

    run.estimate = b.unweight(x_hat);
    residual = y - a.apply(run.estimate);
    const double res = residual.norm() / y_norm;
    run.iterations = k;
    run.trace.push_back({res, merged.left.rank(), merged.right.rank(), kept.left.rank(), kept.right.rank(),
                         run.estimate, x_hat});

    if (res <= cfg.residual_tolerance) {
      run.stop_reason = StopReason::tolerance;
      return run;
    }
    flat = (prev_res - res) < kStagnationTol * prev_res ? flat + 1 : 0;
    prev_res = res;
    if (flat >= kStagnationWindow) {
      run.stop_reason = StopReason::stagnation;
      return run;
    }
    run.stop_reason = StopReason::max_iter;
  }
  return run;
}

/// Unweighted baseline: solve with Q = I.
inline SolverRun admira(const MeasurementOperator& a, const Vector& y, Index rank, int max_iterations = 20) {
  SolverConfig cfg;
  cfg.rank = rank;
  cfg.max_iterations = max_iterations;
  return solve(a, y, cfg);
}

}  // namespace rmspi
