#include "robustlsq/consolidation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robustlsq {

namespace {

int half_majority(int m) { return m / 2 + 1; }

void validate_config(const MedianConfig& cfg) {
  if (cfg.max_iterations < 1 || !(cfg.step_tolerance > 0.0) ||
      !(cfg.singularity_epsilon > 0.0)) {
    throw std::invalid_argument("median config fields must all be positive");
  }
}

double objective(const Eigen::VectorXd& x, const std::vector<Coefficients>& points) {
  double total = 0.0;
  for (const auto& q : points) total += (x - q.vec()).norm();
  return total;
}

}  // namespace

EstimatePool::EstimatePool(int capacity) : capacity_(capacity) {
  if (capacity < 1) {
    throw std::invalid_argument("estimate pool capacity must be at least 1");
  }
}

void EstimatePool::append(std::int64_t batch_id, Coefficients beta) {
  if (size() == capacity_) {
    throw std::invalid_argument("estimate pool is at capacity " + std::to_string(capacity_));
  }
  if (!entries_.empty()) {
    if (batch_id <= entries_.back().id) {
      throw std::invalid_argument("batch ids must be strictly increasing; got " +
                                  std::to_string(batch_id) + " after " +
                                  std::to_string(entries_.back().id));
    }
    if (beta.dim() != entries_.front().beta.dim()) {
      throw std::invalid_argument("estimate dimension mismatch in pool");
    }
  }
  entries_.push_back(Entry{batch_id, std::move(beta)});
}

void EstimatePool::remove(int position) {
  if (position < 0 || position >= size()) {
    throw std::invalid_argument("pool position " + std::to_string(position) +
                                " out of range");
  }
  entries_.erase(entries_.begin() + position);
}

Eigen::Index EstimatePool::dim() const {
  if (entries_.empty()) {
    throw std::invalid_argument("empty pool has no dimension");
  }
  return entries_.front().beta.dim();
}

const Coefficients& EstimatePool::estimate(int position) const {
  if (position < 0 || position >= size()) {
    throw std::invalid_argument("pool position " + std::to_string(position) +
                                " out of range");
  }
  return entries_[static_cast<std::size_t>(position)].beta;
}

std::int64_t EstimatePool::batch_id(int position) const {
  if (position < 0 || position >= size()) {
    throw std::invalid_argument("pool position " + std::to_string(position) +
                                " out of range");
  }
  return entries_[static_cast<std::size_t>(position)].id;
}

bool DominatingSet::contains(int position) const {
  return std::binary_search(members.begin(), members.end(), position);
}

double estimate_distance(const Coefficients& a, const Coefficients& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("estimate dimensions differ: " + std::to_string(a.dim()) +
                                " vs " + std::to_string(b.dim()));
  }
  return (a.vec() - b.vec()).norm();
}

int pivot_batch(const EstimatePool& pool) {
  const int m = pool.size();
  if (m == 0) {
    throw std::invalid_argument("pivot of an empty pool is undefined");
  }
  const int rank = half_majority(m);

  int best = 0;
  double best_sigma = std::numeric_limits<double>::infinity();
  std::vector<double> row(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      row[static_cast<std::size_t>(j)] =
          i == j ? 0.0 : estimate_distance(pool.estimate(i), pool.estimate(j));
    }
    std::sort(row.begin(), row.end());
    const double sigma = row[static_cast<std::size_t>(rank - 1)];
    if (sigma < best_sigma) {
      best_sigma = sigma;
      best = i;
    }
  }
  return best;
}

DominatingSet dominating_set(const EstimatePool& pool) {
  const int m = pool.size();
  const int pivot = pivot_batch(pool);
  const int take = half_majority(m);

  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    dist[static_cast<std::size_t>(j)] =
        j == pivot ? 0.0 : estimate_distance(pool.estimate(pivot), pool.estimate(j));
  }
  std::stable_sort(order.begin(), order.end(), [&dist](int a, int b) {
    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
  });

  DominatingSet result;
  result.pivot = pivot;
  result.members.assign(order.begin(), order.begin() + take);
  std::sort(result.members.begin(), result.members.end());
  return result;
}

Coefficients geometric_median(const std::vector<Coefficients>& points,
                              const MedianConfig& cfg) {
  validate_config(cfg);
  if (points.empty()) {
    throw std::invalid_argument("geometric median of zero points is undefined");
  }
  const Eigen::Index p = points.front().dim();
  for (const auto& q : points) {
    if (q.dim() != p) {
      throw std::invalid_argument("geometric median requires equal dimensions");
    }
  }
  const int n = static_cast<int>(points.size());
  if (n == 1) return points.front();
  if (n == 2) return Coefficients(0.5 * (points[0].vec() + points[1].vec()));

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto& q : points) mean += q.vec();
  mean /= static_cast<double>(n);

  Eigen::VectorXd x = mean;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    // Weiszfeld map over the points not coincident with x, plus the
    // coincident multiplicity for the singularity ("stuck on a data point")
    // correction.
    Eigen::VectorXd weighted = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd subgrad = Eigen::VectorXd::Zero(p);
    double weight_sum = 0.0;
    int multiplicity = 0;
    for (const auto& q : points) {
      const double d = (q.vec() - x).norm();
      if (d <= cfg.singularity_epsilon) {
        ++multiplicity;
        continue;
      }
      weighted += q.vec() / d;
      subgrad += (q.vec() - x) / d;
      weight_sum += 1.0 / d;
    }
    if (multiplicity == n) break;  // all points coincide with the iterate

    const double r = subgrad.norm();
    if (multiplicity > 0 && r <= static_cast<double>(multiplicity)) {
      // The coincident input point satisfies the subgradient optimality
      // condition; return it exactly.
      for (const auto& q : points) {
        if ((q.vec() - x).norm() <= cfg.singularity_epsilon) return q;
      }
    }
    Eigen::VectorXd next = weighted / weight_sum;
    if (multiplicity > 0 && r > 0.0) {
      const double pull = std::min(1.0, static_cast<double>(multiplicity) / r);
      next = (1.0 - pull) * next + pull * x;
    }
    const double step = (next - x).norm();
    x = next;
    if (step < cfg.step_tolerance) break;
  }

  // Safeguard: the sum-of-distances objective of the returned value must not
  // exceed the objective at any input point or at the mean.
  double best_obj = objective(x, points);
  const Coefficients* best_point = nullptr;
  bool mean_wins = false;
  if (objective(mean, points) < best_obj) {
    best_obj = objective(mean, points);
    mean_wins = true;
  }
  for (const auto& q : points) {
    const double obj = objective(q.vec(), points);
    if (obj < best_obj) {
      best_obj = obj;
      best_point = &q;
      mean_wins = false;
    }
  }
  if (best_point) return *best_point;
  if (mean_wins) return Coefficients(mean);
  return Coefficients(std::move(x));
}

std::pair<Coefficients, DominatingSet> consolidate(const EstimatePool& pool,
                                                   const MedianConfig& cfg) {
  DominatingSet dominating = dominating_set(pool);
  std::vector<Coefficients> members;
  members.reserve(dominating.members.size());
  for (int position : dominating.members) {
    members.push_back(pool.estimate(position));
  }
  return {geometric_median(members, cfg), std::move(dominating)};
}

}  // namespace robustlsq
