#include "robustlsq/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "parallel.hpp"
#include "robustlsq/rng.hpp"

namespace robustlsq {

namespace {

// Seed-stream layout: stream 0 drives the ground truth, stream 1 the
// corruption layout, stream 2 + i the content of batch i.
constexpr std::uint64_t kTruthStream = 0;
constexpr std::uint64_t kLayoutStream = 1;
constexpr std::uint64_t kBatchStreamBase = 2;

// Fraction of a batch the majority-guarded counts may not exceed; strictly
// below 1/2 so the guarded majority of batches stays recoverable.
constexpr double kMajorityCap = 0.45;

// floor(ratio * n) computed so that mathematically integral products are not
// pushed below the integer by binary rounding (0.3 * 1000 = 299.999...).
int floor_ratio(double ratio, int n) {
  return static_cast<int>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

// Largest-remainder apportionment of `total` across ideal `shares`, each
// count capped at `cap`; ties go to the lower index.
std::vector<int> apportion(const std::vector<double>& shares, std::int64_t total, int cap) {
  const int m = static_cast<int>(shares.size());
  std::vector<int> counts(static_cast<std::size_t>(m));
  std::vector<std::pair<double, int>> fractional;
  std::int64_t assigned = 0;
  for (int i = 0; i < m; ++i) {
    const double floor_part = std::floor(shares[static_cast<std::size_t>(i)]);
    counts[static_cast<std::size_t>(i)] = static_cast<int>(floor_part);
    assigned += counts[static_cast<std::size_t>(i)];
    fractional.emplace_back(shares[static_cast<std::size_t>(i)] - floor_part, i);
  }
  std::sort(fractional.begin(), fractional.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::int64_t remainder = total - assigned;
  for (std::size_t r = 0; remainder > 0; r = (r + 1) % fractional.size(), --remainder) {
    ++counts[static_cast<std::size_t>(fractional[r].second)];
  }

  // Push any overflow above the cap to the batches with headroom,
  // largest headroom first, ties by lower index.
  auto redistribute = [&](std::int64_t excess) {
    while (excess > 0) {
      int target = -1;
      for (int i = 0; i < m; ++i) {
        if (counts[static_cast<std::size_t>(i)] < cap &&
            (target < 0 || counts[static_cast<std::size_t>(i)] <
                               counts[static_cast<std::size_t>(target)])) {
          target = i;
        }
      }
      if (target < 0) {
        throw std::invalid_argument("corruption budget exceeds layout capacity");
      }
      ++counts[static_cast<std::size_t>(target)];
      --excess;
    }
  };
  std::int64_t over = 0;
  for (int i = 0; i < m; ++i) {
    if (counts[static_cast<std::size_t>(i)] > cap) {
      over += counts[static_cast<std::size_t>(i)] - cap;
      counts[static_cast<std::size_t>(i)] = cap;
    }
  }
  redistribute(over);
  if (std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) != total) {
    throw std::logic_error("apportionment failed to meet the corruption budget");
  }
  return counts;
}

std::vector<int> uniform_counts(const SynthSpec& spec, std::int64_t budget) {
  const int m = spec.m;
  Rng rng(derive_seed(spec.seed, kLayoutStream));
  std::vector<double> weights(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (double& w : weights) {
    w = rng.uniform01();
    sum += w;
  }
  if (sum <= 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0);
    sum = static_cast<double>(m);
  }
  std::vector<double> shares(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    shares[static_cast<std::size_t>(i)] =
        static_cast<double>(budget) * weights[static_cast<std::size_t>(i)] / sum;
  }
  std::vector<int> counts = apportion(shares, budget, spec.n);

  if (m < 3) return counts;

  // Majority guard: cap the floor(m/2)+1 smallest counts at
  // floor(kMajorityCap * n) and push the excess to the remaining batches.
  const int guard_cap = floor_ratio(kMajorityCap, spec.n);
  const int guarded = m / 2 + 1;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&counts](int a, int b) {
    return counts[static_cast<std::size_t>(a)] < counts[static_cast<std::size_t>(b)];
  });
  std::int64_t excess = 0;
  for (int r = 0; r < guarded; ++r) {
    int& c = counts[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    if (c > guard_cap) {
      excess += c - guard_cap;
      c = guard_cap;
    }
  }
  while (excess > 0) {
    // Fill the unguarded batch with the most headroom, ties by lower index.
    int target = -1;
    for (int r = guarded; r < m; ++r) {
      const int i = order[static_cast<std::size_t>(r)];
      if (counts[static_cast<std::size_t>(i)] < spec.n &&
          (target < 0 ||
           counts[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(target)])) {
        target = i;
      }
    }
    if (target < 0) {
      throw std::invalid_argument("corruption budget exceeds layout capacity");
    }
    ++counts[static_cast<std::size_t>(target)];
    --excess;
  }
  return counts;
}

std::vector<int> k_heavy_counts(const SynthSpec& spec, const KHeavyLayout& layout,
                                std::int64_t budget) {
  const int heavy = floor_ratio(layout.heavy_ratio, spec.n);
  const int light = floor_ratio(layout.light_ratio, spec.n);
  const std::int64_t implied = static_cast<std::int64_t>(layout.k) * heavy +
                               static_cast<std::int64_t>(spec.m - layout.k) * light;
  if (implied != budget) {
    throw std::invalid_argument(
        "k-heavy layout implies " + std::to_string(implied) +
        " corrupted samples but gamma budgets " + std::to_string(budget) +
        "; set gamma = " + std::to_string(k_heavy_gamma(layout, spec.n, spec.m)));
  }
  Rng rng(derive_seed(spec.seed, kLayoutStream));
  const std::vector<int> heavy_batches = rng.sample_without_replacement(spec.m, layout.k);
  std::vector<int> counts(static_cast<std::size_t>(spec.m), light);
  for (int i : heavy_batches) counts[static_cast<std::size_t>(i)] = heavy;
  return counts;
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
  if (spec.p < 1 || spec.n < 1 || spec.m < 1) {
    throw std::invalid_argument("p, n, and m must all be positive");
  }
  if (!(spec.gamma >= 0.0) || spec.gamma >= 0.5) {
    throw std::invalid_argument("gamma must lie in [0, 0.5)");
  }
  if (!(spec.sigma >= 0.0)) {
    throw std::invalid_argument("sigma must be non-negative");
  }
  if (const auto* kh = std::get_if<KHeavyLayout>(&spec.layout)) {
    if (kh->k < 0 || kh->k > spec.m) {
      throw std::invalid_argument("k-heavy layout needs 0 <= k <= m");
    }
    if (kh->heavy_ratio < 0.0 || kh->heavy_ratio > 1.0 || kh->light_ratio < 0.0 ||
        kh->light_ratio > 1.0) {
      throw std::invalid_argument("heavy/light ratios must lie in [0, 1]");
    }
    if (static_cast<std::int64_t>(kh->k) *
            floor_ratio(kh->heavy_ratio, spec.n) >
        corruption_budget(spec)) {
      throw std::invalid_argument("heavy batches alone exceed the gamma budget");
    }
  }
}

std::int64_t corruption_budget(const SynthSpec& spec) {
  return std::llround(spec.gamma * static_cast<double>(spec.m) *
                      static_cast<double>(spec.n));
}

double k_heavy_gamma(const KHeavyLayout& layout, int n, int m) {
  const std::int64_t total =
      static_cast<std::int64_t>(layout.k) * floor_ratio(layout.heavy_ratio, n) +
      static_cast<std::int64_t>(m - layout.k) * floor_ratio(layout.light_ratio, n);
  return static_cast<double>(total) / (static_cast<double>(m) * static_cast<double>(n));
}

std::vector<int> corruption_counts(const SynthSpec& spec) {
  validate_spec(spec);
  const std::int64_t budget = corruption_budget(spec);
  if (budget == 0) return std::vector<int>(static_cast<std::size_t>(spec.m), 0);
  if (const auto* kh = std::get_if<KHeavyLayout>(&spec.layout)) {
    return k_heavy_counts(spec, *kh, budget);
  }
  return uniform_counts(spec, budget);
}

GroundTruth gen_ground_truth(const SynthSpec& spec) {
  validate_spec(spec);
  Rng rng(derive_seed(spec.seed, kTruthStream));
  Eigen::VectorXd g(spec.p);
  double norm_sq = 0.0;
  do {
    for (int i = 0; i < spec.p; ++i) g[i] = rng.normal();
    norm_sq = g.squaredNorm();
  } while (norm_sq == 0.0);
  return GroundTruth{Coefficients(g / std::sqrt(norm_sq)), {}, {}};
}

std::vector<MiniBatch> gen_batches(const SynthSpec& spec, GroundTruth& truth,
                                   int threads) {
  validate_spec(spec);
  if (truth.beta_star.dim() != spec.p) {
    throw std::invalid_argument("ground truth dimension does not match spec.p");
  }
  const std::vector<int> counts = corruption_counts(spec);
  const Eigen::VectorXd& beta = truth.beta_star.vec();

  std::vector<MiniBatch> batches;
  batches.reserve(static_cast<std::size_t>(spec.m));
  for (int i = 0; i < spec.m; ++i) {
    batches.emplace_back(Eigen::MatrixXd::Zero(spec.p, 1), Eigen::VectorXd::Zero(1), i);
  }
  truth.uncorrupted_sets.assign(static_cast<std::size_t>(spec.m), IndexSet({}, 0));
  truth.corruption_vectors.assign(static_cast<std::size_t>(spec.m), Eigen::VectorXd());

  detail::parallel_for(spec.m, threads, [&](int i) {
    Rng rng(derive_seed(spec.seed, kBatchStreamBase + static_cast<std::uint64_t>(i)));
    Eigen::MatrixXd x(spec.p, spec.n);
    for (int j = 0; j < spec.n; ++j) {
      for (int row = 0; row < spec.p; ++row) x(row, j) = rng.normal();
    }
    Eigen::VectorXd y_star(spec.n);
    for (int j = 0; j < spec.n; ++j) {
      double acc = 0.0;
      for (int row = 0; row < spec.p; ++row) acc += x(row, j) * beta[row];
      y_star[j] = acc + spec.sigma * rng.normal();
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(spec.n);
    const int bad = counts[static_cast<std::size_t>(i)];
    std::vector<int> corrupted = rng.sample_without_replacement(spec.n, bad);
    if (bad > 0) {
      const double bound = 5.0 * y_star.cwiseAbs().maxCoeff();
      for (int j : corrupted) {
        double value = rng.uniform(-bound, bound);
        // An exactly-zero draw would break the support/corruption-vector
        // correspondence; redraw (probability ~2^-53 per draw).
        while (value == 0.0) value = rng.uniform(-bound, bound);
        u[j] = value;
      }
    }

    std::vector<int> clean;
    clean.reserve(static_cast<std::size_t>(spec.n - bad));
    for (int j = 0; j < spec.n; ++j) {
      if (!std::binary_search(corrupted.begin(), corrupted.end(), j)) clean.push_back(j);
    }
    batches[static_cast<std::size_t>(i)] = MiniBatch(std::move(x), y_star + u, i);
    truth.uncorrupted_sets[static_cast<std::size_t>(i)] = IndexSet(std::move(clean), spec.n);
    truth.corruption_vectors[static_cast<std::size_t>(i)] = std::move(u);
  });
  return batches;
}

std::pair<Eigen::VectorXd, IndexSet> inject_corruption(const Eigen::VectorXd& y,
                                                       double ratio,
                                                       std::uint64_t seed) {
  if (!(ratio >= 0.0) || ratio >= 1.0) {
    throw std::invalid_argument("corruption ratio must lie in [0, 1)");
  }
  const int n = static_cast<int>(y.size());
  const int count = floor_ratio(ratio, n);
  Rng rng(seed);
  std::vector<int> positions = rng.sample_without_replacement(n, count);
  Eigen::VectorXd corrupted = y;
  for (int j : positions) {
    corrupted[j] += rng.uniform(-0.5 * std::abs(y[j]), 0.5 * std::abs(y[j]));
  }
  return {std::move(corrupted), IndexSet(std::move(positions), n)};
}

}  // namespace robustlsq
