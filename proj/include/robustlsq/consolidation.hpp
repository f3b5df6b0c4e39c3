#ifndef ROBUSTLSQ_CONSOLIDATION_HPP_
#define ROBUSTLSQ_CONSOLIDATION_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "robustlsq/batch.hpp"

namespace robustlsq {

/// Weiszfeld solver knobs. step_tolerance and singularity_epsilon are
/// absolute, in coefficient units.
struct MedianConfig {
  int max_iterations = 1000;
  double step_tolerance = 1e-10;
  double singularity_epsilon = 1e-12;
};

/// Ordered collection of per-batch estimates. Insertion order is age order:
/// batch ids must be strictly increasing, so position 0 is always the oldest
/// member. All estimates share one dimension.
class EstimatePool {
 public:
  explicit EstimatePool(int capacity);

  /// Appends at the tail; id must exceed every stored id.
  void append(std::int64_t batch_id, Coefficients beta);
  /// Removes the member at `position`, keeping age order intact.
  void remove(int position);

  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  Eigen::Index dim() const;
  const Coefficients& estimate(int position) const;
  std::int64_t batch_id(int position) const;

 private:
  struct Entry {
    std::int64_t id;
    Coefficients beta;
  };
  std::vector<Entry> entries_;
  int capacity_;
};

/// The floor(m/2) + 1 pool positions nearest the pivot estimate, sorted
/// ascending; the pivot is always a member.
struct DominatingSet {
  std::vector<int> members;
  int pivot = 0;

  bool contains(int position) const;
  bool operator==(const DominatingSet& other) const {
    return pivot == other.pivot && members == other.members;
  }
};

/// Euclidean distance between two estimates.
double estimate_distance(const Coefficients& a, const Coefficients& b);

/// Position whose distance vector to all pool members (self included, so the
/// smallest entry is always 0) has the smallest floor(m/2)+1-th smallest
/// entry; ties break to the lowest position.
int pivot_batch(const EstimatePool& pool);

/// Members nearest the pivot, ties by lowest position.
DominatingSet dominating_set(const EstimatePool& pool);

/// Minimizer of the sum of Euclidean distances to the points, via Weiszfeld
/// iteration from the coordinate-wise mean. An iterate landing within
/// singularity_epsilon of an input point returns that point when its
/// subgradient certifies optimality. The result's objective never exceeds
/// the objective at any input point or at the mean.
Coefficients geometric_median(const std::vector<Coefficients>& points,
                              const MedianConfig& cfg = MedianConfig{});

/// Pivot, dominating set, then geometric median of the dominating members.
std::pair<Coefficients, DominatingSet> consolidate(const EstimatePool& pool,
                                                   const MedianConfig& cfg = MedianConfig{});

}  // namespace robustlsq

#endif  // ROBUSTLSQ_CONSOLIDATION_HPP_
