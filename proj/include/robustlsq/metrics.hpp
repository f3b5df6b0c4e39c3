#ifndef ROBUSTLSQ_METRICS_HPP_
#define ROBUSTLSQ_METRICS_HPP_

#include <Eigen/Dense>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/hrr.hpp"

namespace robustlsq {

/// Euclidean distance between an estimate and the reference coefficients.
double l2_error(const Coefficients& estimate, const Coefficients& truth);

/// Mean absolute deviation between two equal-length nonempty vectors.
double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

/// Arithmetic mean of the per-batch full-sample least-squares fits. Every
/// batch needs n >= p; a singular batch propagates as numerical_error.
Coefficients baseline_ols_avg(const std::vector<MiniBatch>& batches);

/// Arithmetic mean of the per-batch robust fits. Deliberately not robust to
/// a batch whose corruption exceeds what one batch can absorb: one such
/// batch drags the average, which is the contrast the consolidated methods
/// are measured against.
Coefficients baseline_hrr_avg(const std::vector<MiniBatch>& batches,
                              const HrrConfig& cfg = HrrConfig{}, int threads = 0);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_METRICS_HPP_
