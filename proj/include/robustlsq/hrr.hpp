#ifndef ROBUSTLSQ_HRR_HPP_
#define ROBUSTLSQ_HRR_HPP_

#include <utility>

#include "robustlsq/batch.hpp"

namespace robustlsq {

/// Knobs for the alternating hard-thresholding fit.
///
/// ridge_fallback is a relative multiplier: when the subset Gram matrix is
/// singular the solver retries once with ridge_fallback * trace(Gram)/p added
/// to the diagonal, so the default stays meaningful across data scales.
struct HrrConfig {
  double tolerance_eps = 1e-6;
  int max_iterations = 100;
  double ridge_fallback = 1e-10;
};

struct HrrResult {
  Coefficients beta;
  IndexSet uncorrupted;
  int iterations = 0;
  bool converged = false;
};

/// Size estimate tau_o: argmin over tau in [ceil(n/2)+1, n] of
/// |r_phi(tau)^2 - mean squared value of the tau' smallest magnitudes| with
/// tau' = tau - ceil(n/2). Ties break to the smallest tau. Requires n >= 2.
int tau_o(const ResidualVector& r);

/// Estimated lower-bound size of the uncorrupted set: the largest tau in
/// [1, n] with r_phi(tau) <= 2 tau r_phi(tau_o) / tau_o. Always lands in
/// [ceil(n/2), n]. Requires n >= 2.
int heuristic_size(const ResidualVector& r);

/// Indices of the heuristic_size(r) smallest residual magnitudes; ties go to
/// the lower sample index. Requires n >= 2.
IndexSet hard_threshold(const ResidualVector& r);

/// Normal-equation solve on the restricted batch. Retries once with the
/// ridge fallback when the Gram matrix is singular; *used_ridge (optional)
/// reports whether the retry happened. Throws numerical_error if the system
/// stays unsolvable.
Coefficients least_squares_subset(const MiniBatch& batch, const IndexSet& z,
                                  const HrrConfig& cfg = HrrConfig{},
                                  bool* used_ridge = nullptr);

/// Alternating fit: start from the full index set, repeat subset least
/// squares followed by hard thresholding of the residual magnitudes. Stops
/// at an exact fixed point (Z unchanged) or when the restricted residual
/// norm changes by less than tolerance_eps * n between iterations; the
/// converged flag is false only when max_iterations ended the loop.
/// Residuals below the backward-error level of their own dot product are
/// treated as exact zeros, so noiseless data converges to the full clean
/// set rather than thresholding rounding noise. Requires n >= max(2, p).
HrrResult hrr_fit(const MiniBatch& batch, const HrrConfig& cfg = HrrConfig{});

/// Extreme eigenvalues of X_S X_S^T over every size-subset_size column
/// subset: (min over S of the smallest, max over S of the largest). A
/// diagnostic for the subset strong convexity/smoothness of a design;
/// exhaustive, therefore capped at n <= 25 (capability_error beyond).
std::pair<double, double> ssc_sss_constants(const MiniBatch& batch, int subset_size);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_HRR_HPP_
