#include "robustlsq/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "robustlsq/consolidation.hpp"

namespace robustlsq {

double l2_error(const Coefficients& estimate, const Coefficients& truth) {
  if (estimate.dim() != truth.dim()) {
    throw std::invalid_argument("estimate and reference dimensions differ");
  }
  return estimate_distance(estimate, truth);
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() == 0) {
    throw std::invalid_argument("mae needs at least one sample");
  }
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("prediction and reference lengths differ");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

namespace {

Coefficients average(const std::vector<Coefficients>& estimates) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(estimates.front().dim());
  for (const Coefficients& c : estimates) sum += c.vec();
  return Coefficients(sum / static_cast<double>(estimates.size()));
}

void check_batches(const std::vector<MiniBatch>& batches) {
  if (batches.empty()) {
    throw std::invalid_argument("at least one batch is required");
  }
  const Eigen::Index p = batches.front().p();
  for (const MiniBatch& b : batches) {
    if (b.p() != p) {
      throw std::invalid_argument("batch " + std::to_string(b.id()) +
                                  " has a different feature dimension");
    }
  }
}

}  // namespace

Coefficients baseline_ols_avg(const std::vector<MiniBatch>& batches) {
  check_batches(batches);
  for (const MiniBatch& b : batches) {
    if (b.n() < b.p()) {
      throw std::invalid_argument("batch " + std::to_string(b.id()) +
                                  " has fewer samples than features");
    }
  }
  std::vector<Coefficients> fits;
  fits.reserve(batches.size());
  for (const MiniBatch& b : batches) {
    fits.push_back(least_squares_subset(b, IndexSet::full(static_cast<int>(b.n()))));
  }
  return average(fits);
}

Coefficients baseline_hrr_avg(const std::vector<MiniBatch>& batches, const HrrConfig& cfg,
                              int threads) {
  check_batches(batches);
  std::vector<Coefficients> fits(batches.size(),
                                 Coefficients(Eigen::VectorXd::Zero(batches.front().p())));
  detail::parallel_for(static_cast<int>(batches.size()), threads, [&](int i) {
    fits[static_cast<std::size_t>(i)] = hrr_fit(batches[static_cast<std::size_t>(i)], cfg).beta;
  });
  return average(fits);
}

}  // namespace robustlsq
