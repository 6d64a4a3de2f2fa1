#pragma once
//
// Convergence constants of the weighted greedy recovery and SNR metrics.
//
//   rho(d) = sqrt(2 d^2 (1 + 3 d^2) / (1 - d^2))
//
// rho < 1 iff 6 d^4 + 3 d^2 - 1 < 0, i.e. d < sqrt((sqrt(11/3) - 1) / 4).
//

#include <cmath>
#include <limits>

#include "rmspi/matcore.hpp"

namespace rmspi {

inline double convergence_factor(double delta) {
  detail::require(delta >= 0.0, "convergence_factor: delta must be nonnegative");
  detail::require(delta < 1.0, "convergence_factor: delta must be below 1");
  const double d2 = delta * delta;
  return std::sqrt(2.0 * d2 * (1.0 + 3.0 * d2) / (1.0 - d2));
}

/// Positive root of 6 t^4 + 3 t^2 - 1.
inline double delta_threshold() { return std::sqrt((std::sqrt(11.0 / 3.0) - 1.0) / 4.0); }

/// Coefficient of the projected proxy-noise norm.
inline double proxy_noise_coefficient(double delta) {
  const double d2 = delta * delta;
  return std::sqrt(2.0 * (1.0 + 3.0 * d2) / (1.0 - d2));
}

/// Coefficient of the projected residual-noise norm.
inline double residual_noise_coefficient(double delta) { return 2.0 / (1.0 - delta); }

/// Smallest delta with rho(delta) = rate, by bisection on [0, 1).
inline double delta_for_rate(double rate) {
  detail::require(rate >= 0.0, "delta_for_rate: rate must be nonnegative");
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (convergence_factor(mid) < rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct ConvergenceReport {
  double delta = 0.0;
  double rho = 0.0;
  bool converges = false;
  double proxy_noise_coeff = 0.0;
  double residual_noise_coeff = 0.0;
};

inline ConvergenceReport convergence_report(double delta) {
  ConvergenceReport rep;
  rep.delta = delta;
  rep.rho = convergence_factor(delta);
  rep.converges = delta < delta_threshold();
  rep.proxy_noise_coeff = proxy_noise_coefficient(delta);
  rep.residual_noise_coeff = residual_noise_coefficient(delta);
  return rep;
}

/// rho^k init_err + c1 proxy_noise + c2 residual_noise. The two noise norms
/// are projections of B*(e) and B(e) supplied by the caller.
inline double error_bound(double delta, int k, double init_err, double proxy_noise, double residual_noise) {
  detail::require(delta >= 0.0 && delta < delta_threshold(), "error_bound: delta is outside the convergent range");
  detail::require(k >= 0, "error_bound: iteration count must be nonnegative");
  detail::require(init_err >= 0.0 && proxy_noise >= 0.0 && residual_noise >= 0.0,
                  "error_bound: norms must be nonnegative");
  const double geometric = k == 0 ? init_err : std::pow(convergence_factor(delta), k) * init_err;
  return geometric + proxy_noise_coefficient(delta) * proxy_noise + residual_noise_coefficient(delta) * residual_noise;
}

inline double normalized_error(const Matrix& truth, const Matrix& estimate) {
  const double t = truth.norm();
  detail::require(t > 0.0, "normalized_error: truth must be nonzero");
  detail::require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(),
                  "normalized_error: dimension mismatch");
  return (truth - estimate).norm() / t;
}

/// 20 log10(||truth|| / ||truth - estimate||); +inf for an exact estimate.
inline double snr_db(const Matrix& truth, const Matrix& estimate) {
  const double e = normalized_error(truth, estimate);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(e);
}

}  // namespace rmspi
