#include "robustlsq/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace robustlsq {

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw std::invalid_argument("sample_without_replacement requires 0 <= k <= n");
  }
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t span = static_cast<std::uint64_t>(n - i);
    const int j = i + static_cast<int>(span == 1 ? 0 : below(span));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace robustlsq
