#ifndef ROBUSTLSQ_DATAGEN_HPP_
#define ROBUSTLSQ_DATAGEN_HPP_

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "robustlsq/batch.hpp"

namespace robustlsq {

/// Per-batch corruption counts drawn from random proportions that sum to the
/// total budget. When m >= 3 the floor(m/2)+1 smallest counts are capped at
/// floor(0.45 n), so a majority of batches always stays individually
/// recoverable while the rest may exceed half corruption.
struct UniformRatiosLayout {};

/// Exactly k batches (chosen uniformly at random) carry floor(heavy_ratio*n)
/// corrupted samples each; every other batch carries floor(light_ratio*n).
/// The implied total must equal the gamma budget (see layout_total).
struct KHeavyLayout {
  int k = 0;
  double heavy_ratio = 0.9;
  double light_ratio = 0.1;
};

using CorruptionLayout = std::variant<UniformRatiosLayout, KHeavyLayout>;

/// Generator inputs. gamma is the total corruption ratio: round(gamma*m*n)
/// response entries across the whole dataset receive additive corruption.
struct SynthSpec {
  int p = 20;
  int n = 1000;
  int m = 10;
  double gamma = 0.2;
  double sigma = 0.1;
  CorruptionLayout layout = UniformRatiosLayout{};
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument when any field is out of range or the layout
/// cannot meet the gamma budget.
void validate_spec(const SynthSpec& spec);

/// Total corrupted-sample budget: round(gamma * m * n).
std::int64_t corruption_budget(const SynthSpec& spec);

/// Per-batch corrupted counts for the spec's layout, summing exactly to the
/// budget. Deterministic under seed.
std::vector<int> corruption_counts(const SynthSpec& spec);

/// gamma value consistent with a k-heavy layout's exact per-batch counts.
double k_heavy_gamma(const KHeavyLayout& layout, int n, int m);

/// Unit-norm coefficient vector from the spec's seed; the per-batch fields
/// of the result are filled in by gen_batches.
GroundTruth gen_ground_truth(const SynthSpec& spec);

/// Batches with standard-normal covariates, dense Gaussian noise of standard
/// deviation sigma, and additive corruption uniform in +-5 max|y*| on the
/// laid-out subsets. Fills truth.uncorrupted_sets and
/// truth.corruption_vectors. Schedule-independent: batch i depends only on
/// (seed, i).
std::vector<MiniBatch> gen_batches(const SynthSpec& spec, GroundTruth& truth,
                                   int threads = 0);

/// Adds noise uniform in +-0.5|y_i| to a random floor(ratio * n) subset of
/// positions; returns the modified vector and the chosen positions.
std::pair<Eigen::VectorXd, IndexSet> inject_corruption(const Eigen::VectorXd& y,
                                                       double ratio,
                                                       std::uint64_t seed);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_DATAGEN_HPP_
