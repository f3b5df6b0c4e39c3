#include "robustlsq/hrr.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustlsq/errors.hpp"

namespace robustlsq {

namespace {

int ceil_half(int n) { return (n + 1) / 2; }

void require_n_at_least_2(const ResidualVector& r) {
  if (r.n() < 2) {
    throw std::invalid_argument("residual thresholding requires at least 2 samples");
  }
}

void validate_config(const HrrConfig& cfg) {
  if (!(cfg.tolerance_eps > 0.0)) {
    throw std::invalid_argument("tolerance_eps must be positive");
  }
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (!(cfg.ridge_fallback >= 0.0)) {
    throw std::invalid_argument("ridge_fallback must be non-negative");
  }
}

// Residual magnitudes below the componentwise backward-error level of the
// dot product that produced them are indistinguishable from exact zeros at
// working precision; snap them so noiseless data reaches the all-zero
// residual fixed point instead of thresholding rounding noise.
ResidualVector snap_rounding_zeros(const MiniBatch& batch, const Coefficients& beta,
                                   const ResidualVector& exact) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double c = 4.0 * static_cast<double>(batch.p() + 2) * eps;
  Eigen::VectorXd snapped = exact.r();
  for (Eigen::Index j = 0; j < batch.n(); ++j) {
    double scale = std::abs(batch.y()[j]);
    for (Eigen::Index i = 0; i < batch.p(); ++i) {
      scale += std::abs(batch.x()(i, j) * beta.vec()[i]);
    }
    if (snapped[j] <= c * scale) snapped[j] = 0.0;
  }
  return ResidualVector(std::move(snapped));
}

// LDLT solve of a positive semidefinite system; empty when the matrix is
// singular within machine tolerance.
std::optional<Eigen::VectorXd> solve_spd(const Eigen::MatrixXd& gram,
                                         const Eigen::VectorXd& rhs) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  if (!(dmax > 0.0) || d.minCoeff() <= dmax * 1e-13) return std::nullopt;
  Eigen::VectorXd beta = ldlt.solve(rhs);
  if (!beta.allFinite()) return std::nullopt;
  return beta;
}

}  // namespace

int tau_o(const ResidualVector& r) {
  require_n_at_least_2(r);
  const int n = static_cast<int>(r.n());
  const int half = ceil_half(n);

  // prefix[k] = sum of squares of the k smallest magnitudes, accumulated in
  // ascending order so any re-summation in that order reproduces it exactly.
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double v = r.sorted(k - 1);
    prefix[static_cast<std::size_t>(k)] = prefix[static_cast<std::size_t>(k) - 1] + v * v;
  }

  int best_tau = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int tau = half + 1; tau <= n; ++tau) {
    const int tau_prime = tau - half;
    const double rt = r.sorted(tau - 1);
    const double score =
        std::abs(rt * rt - prefix[static_cast<std::size_t>(tau_prime)] /
                               static_cast<double>(tau_prime));
    if (score < best_score) {
      best_score = score;
      best_tau = tau;
    }
  }
  return best_tau;
}

int heuristic_size(const ResidualVector& r) {
  require_n_at_least_2(r);
  const int n = static_cast<int>(r.n());
  const int to = tau_o(r);
  const double rto = r.sorted(to - 1);
  for (int tau = n; tau >= 1; --tau) {
    if (r.sorted(tau - 1) <= 2.0 * static_cast<double>(tau) * rto / static_cast<double>(to)) {
      return tau;
    }
  }
  // tau = tau_o always satisfies its own bound, so the scan cannot fall out.
  throw std::logic_error("heuristic_size found no feasible threshold");
}

IndexSet hard_threshold(const ResidualVector& r) {
  const int keep = heuristic_size(r);
  std::vector<int> members(r.order().begin(), r.order().begin() + keep);
  return IndexSet(std::move(members), static_cast<int>(r.n()));
}

Coefficients least_squares_subset(const MiniBatch& batch, const IndexSet& z,
                                  const HrrConfig& cfg, bool* used_ridge) {
  validate_config(cfg);
  if (z.size() == 0) {
    throw std::invalid_argument("least-squares subset must be non-empty");
  }
  const MiniBatch sub = restrict(batch, z);
  const Eigen::MatrixXd gram = sub.x() * sub.x().transpose();
  const Eigen::VectorXd rhs = sub.x() * sub.y();

  if (auto beta = solve_spd(gram, rhs)) {
    if (used_ridge) *used_ridge = false;
    return Coefficients(std::move(*beta));
  }
  const double ridge =
      cfg.ridge_fallback * gram.trace() / static_cast<double>(batch.p());
  Eigen::MatrixXd regularized = gram;
  regularized.diagonal().array() += ridge;
  if (auto beta = solve_spd(regularized, rhs)) {
    if (used_ridge) *used_ridge = true;
    return Coefficients(std::move(*beta));
  }
  throw numerical_error("batch " + std::to_string(batch.id()) +
                        ": subset Gram matrix is singular even after ridge fallback");
}

HrrResult hrr_fit(const MiniBatch& batch, const HrrConfig& cfg) {
  validate_config(cfg);
  const int n = static_cast<int>(batch.n());
  const int p = static_cast<int>(batch.p());
  if (n < std::max(2, p)) {
    throw std::invalid_argument("hrr_fit requires n >= max(2, p); got n = " +
                                std::to_string(n) + ", p = " + std::to_string(p));
  }

  IndexSet z = IndexSet::full(n);
  std::optional<Coefficients> beta;
  double prev_norm = 0.0;
  bool have_prev = false;
  int iterations = 0;
  bool converged = false;

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    iterations = t;
    beta = least_squares_subset(batch, z, cfg);
    const ResidualVector r = snap_rounding_zeros(batch, *beta, residual_magnitudes(batch, *beta));
    IndexSet z_next = hard_threshold(r);

    double restricted_sq = 0.0;
    for (int i : z_next.indices()) restricted_sq += r.r()[i] * r.r()[i];
    const double cur_norm = std::sqrt(restricted_sq);

    const bool fixed_point = (z_next == z);
    z = std::move(z_next);
    if (fixed_point) {
      converged = true;
      break;
    }
    if (have_prev &&
        std::abs(cur_norm - prev_norm) < cfg.tolerance_eps * static_cast<double>(n)) {
      converged = true;
      break;
    }
    prev_norm = cur_norm;
    have_prev = true;
  }
  return HrrResult{std::move(*beta), std::move(z), iterations, converged};
}

std::pair<double, double> ssc_sss_constants(const MiniBatch& batch, int subset_size) {
  const int n = static_cast<int>(batch.n());
  if (subset_size < 1 || subset_size > n) {
    throw std::invalid_argument("subset_size must lie in [1, n]");
  }
  if (n > 25) {
    throw capability_error("subset eigenvalue enumeration is capped at n <= 25; got n = " +
                           std::to_string(n));
  }

  const int k = subset_size;
  std::vector<int> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), 0);

  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = -std::numeric_limits<double>::infinity();
  Eigen::MatrixXd xs(batch.p(), k);
  while (true) {
    for (int j = 0; j < k; ++j) xs.col(j) = batch.x().col(comb[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd gram = xs * xs.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw numerical_error("eigenvalue computation failed during subset enumeration");
    }
    min_eig = std::min(min_eig, es.eigenvalues()(0));
    max_eig = std::max(max_eig, es.eigenvalues()(batch.p() - 1));

    // Advance to the next k-combination of [0, n) in lexicographic order.
    int i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j) - 1] + 1;
    }
  }
  return {min_eig, max_eig};
}

}  // namespace robustlsq
