#pragma once
//
// Prior-information weighting operators
//
//   single:        Q = w_span P_prior + w_comp P_prior_perp
//   per-direction: Q = U diag(W_span) U^T + C diag(W_comp) C^T + P_rest
//
// where C holds r directions of the prior's orthogonal complement and P_rest
// projects onto the n - 2r directions left over (weight one).
//

#include <optional>
#include <span>
#include <vector>

#include "rmspi/matcore.hpp"

namespace rmspi {

enum class WeightMode { single, per_direction };

struct WeightSpec {
  WeightMode mode = WeightMode::single;
  std::vector<double> span_weights{1.0};
  std::vector<double> complement_weights{1.0};

  static WeightSpec single(double span, double comp) { return {WeightMode::single, {span}, {comp}}; }
  static WeightSpec per_direction(std::vector<double> span, std::vector<double> comp) {
    return {WeightMode::per_direction, std::move(span), std::move(comp)};
  }
  static WeightSpec identity() { return single(1.0, 1.0); }

  bool operator==(const WeightSpec&) const = default;

  /// Throws InvalidArgument unless every weight lies in (0, 1] and the
  /// lengths fit a prior of the given rank.
  void validate(Index prior_rank) const {
    auto check = [](const std::vector<double>& ws) {
      for (double w : ws) detail::require(w > 0.0 && w <= 1.0, "WeightSpec: weights must lie in (0, 1]");
    };
    check(span_weights);
    check(complement_weights);
    if (mode == WeightMode::single) {
      detail::require(span_weights.size() == 1 && complement_weights.size() == 1,
                      "WeightSpec: single mode takes exactly one span and one complement weight");
    } else {
      detail::require(static_cast<Index>(span_weights.size()) == prior_rank &&
                          static_cast<Index>(complement_weights.size()) == prior_rank,
                      "WeightSpec: per-direction weights must have one entry per prior direction");
    }
  }
};

struct WeightOperator {
  SubspaceBasis prior;
  SubspaceBasis complement;  // weighted complement directions; empty in single mode
  WeightSpec spec;
  Matrix q;
  Matrix q_inv;

  Index dim() const { return q.rows(); }
};

namespace detail {

// I + sum_i (f(w_i) - 1) b_i b_i^T. Exactly the identity when every f(w_i) is 1.
inline Matrix weighted_identity(Index n, std::span<const Matrix* const> bases,
                                std::span<const std::vector<double>* const> weights, bool reciprocal) {
  Matrix out = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < bases.size(); ++k) {
    const Matrix& b = *bases[k];
    const std::vector<double>& ws = *weights[k];
    Vector shift(b.cols());
    for (Index i = 0; i < b.cols(); ++i) {
      const double w = ws[static_cast<std::size_t>(i)];
      shift(i) = (reciprocal ? 1.0 / w : w) - 1.0;
    }
    out.noalias() += b * shift.asDiagonal() * b.transpose();
  }
  return 0.5 * (out + out.transpose());
}

inline WeightOperator assemble(const SubspaceBasis& prior, SubspaceBasis comp, const WeightSpec& spec) {
  const Index n = prior.ambient_dim();
  WeightOperator op{prior, std::move(comp), spec, {}, {}};
  if (spec.mode == WeightMode::single) {
    // Q = w_c I + (w_s - w_c) U U^T
    const double ws = spec.span_weights[0], wc = spec.complement_weights[0];
    const Matrix p = prior.projector();
    op.q = wc * Matrix::Identity(n, n) + (ws - wc) * p;
    op.q_inv = (1.0 / wc) * Matrix::Identity(n, n) + (1.0 / ws - 1.0 / wc) * p;
    op.q = 0.5 * (op.q + op.q.transpose()).eval();
    op.q_inv = 0.5 * (op.q_inv + op.q_inv.transpose()).eval();
    return op;
  }
  const Matrix* bases[] = {&op.prior.matrix(), &op.complement.matrix()};
  const std::vector<double>* ws[] = {&spec.span_weights, &spec.complement_weights};
  op.q = weighted_identity(n, bases, ws, false);
  op.q_inv = weighted_identity(n, bases, ws, true);
  return op;
}

}  // namespace detail

/// r orthonormal complement directions aligned with `reference`: the leading
/// left singular vectors of P_prior_perp * reference. If the projection is
/// rank deficient (reference inside the prior), the remainder is filled with
/// random complement directions drawn from `rng`.
inline SubspaceBasis aligned_complement_directions(const SubspaceBasis& prior, const SubspaceBasis& reference,
                                                   Rng& rng) {
  detail::require(prior.ambient_dim() == reference.ambient_dim(),
                  "aligned_complement_directions: ambient dimension mismatch");
  const Index n = prior.ambient_dim();
  const Index r = prior.rank();
  detail::require(n >= 2 * r, "aligned_complement_directions: ambient dimension must be at least twice the rank");
  const Matrix& u = prior.matrix();
  Matrix proj = reference.matrix() - u * (u.transpose() * reference.matrix());

  // Ascending singular value, so that for principal-vector bases direction i
  // pairs with prior direction i (ascending principal angle).
  Matrix picked(n, 0);
  if (proj.cols() > 0 && proj.norm() > kRankDropTol) {
    const SvdResult s = svd(proj);
    Index keep = 0;
    while (keep < std::min(r, s.singular_values.size()) && s.singular_values(keep) > kRankDropTol) ++keep;
    picked = s.left.matrix().leftCols(keep).rowwise().reverse();
  }
  if (picked.cols() == r) return SubspaceBasis(picked);

  const Index missing = r - picked.cols();
  Matrix all(n, u.cols() + picked.cols() + missing);
  all << u, picked, gaussian_matrix(n, missing, rng);
  const SubspaceBasis q = orthonormalize(all);
  if (q.rank() != all.cols()) throw NumericalError("aligned_complement_directions: degenerate fill");
  Matrix out(n, r);
  out << q.matrix().rightCols(missing), q.matrix().middleCols(u.cols(), picked.cols());
  return SubspaceBasis(std::move(out));
}

/// r random orthonormal directions of the prior's orthogonal complement.
inline SubspaceBasis random_complement_directions(const SubspaceBasis& prior, Rng& rng) {
  return aligned_complement_directions(prior, SubspaceBasis::empty(prior.ambient_dim()), rng);
}

/// Builds Q with explicitly supplied complement directions (ignored in single mode).
inline WeightOperator build_weight_operator(const SubspaceBasis& prior, const WeightSpec& spec,
                                            const SubspaceBasis& complement_dirs) {
  spec.validate(prior.rank());
  if (spec.mode == WeightMode::single) return detail::assemble(prior, SubspaceBasis::empty(prior.ambient_dim()), spec);
  detail::require(complement_dirs.ambient_dim() == prior.ambient_dim() && complement_dirs.rank() == prior.rank(),
                  "build_weight_operator: need one complement direction per prior direction");
  const double leak = (prior.matrix().transpose() * complement_dirs.matrix()).cwiseAbs().maxCoeff();
  detail::require(leak <= kOrthonormalTol, "build_weight_operator: complement directions are not orthogonal to the prior");
  return detail::assemble(prior, complement_dirs, spec);
}

/// Builds Q; per-direction mode draws random complement directions from `rng`.
inline WeightOperator build_weight_operator(const SubspaceBasis& prior, const WeightSpec& spec, Rng& rng) {
  spec.validate(prior.rank());
  if (spec.mode == WeightMode::single) return detail::assemble(prior, SubspaceBasis::empty(prior.ambient_dim()), spec);
  return detail::assemble(prior, random_complement_directions(prior, rng), spec);
}

/// Identity operator on R^n.
inline WeightOperator identity_weight(Index n) {
  return detail::assemble(SubspaceBasis::empty(n), SubspaceBasis::empty(n), WeightSpec::identity());
}

inline const Matrix& invert(const WeightOperator& op) { return op.q_inv; }

/// Eigenvalues of Q, ascending.
inline Vector eigenvalues(const WeightOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.q, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Heuristic angle-to-weight map w(theta) = clamp(0.1 + 0.8 theta / 90, 0.1, 1):
/// span directions get w(theta), complement directions w(90 - theta). Single
/// mode applies the map to the mean angle.
inline double angle_weight(double theta_deg) { return std::clamp(0.1 + 0.8 * theta_deg / 90.0, 0.1, 1.0); }

inline WeightSpec angles_to_weights(std::span<const double> angles_deg, WeightMode mode) {
  detail::require(!angles_deg.empty(), "angles_to_weights: no angles given");
  for (double a : angles_deg)
    detail::require(a >= 0.0 && a <= 90.0, "angles_to_weights: angles must lie in [0, 90] degrees");
  if (mode == WeightMode::single) {
    double mean = 0.0;
    for (double a : angles_deg) mean += a;
    mean /= static_cast<double>(angles_deg.size());
    return WeightSpec::single(angle_weight(mean), angle_weight(90.0 - mean));
  }
  std::vector<double> span, comp;
  for (double a : angles_deg) {
    span.push_back(angle_weight(a));
    comp.push_back(angle_weight(90.0 - a));
  }
  return WeightSpec::per_direction(std::move(span), std::move(comp));
}

}  // namespace rmspi
