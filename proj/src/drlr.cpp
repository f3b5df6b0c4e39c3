#include "robustlsq/drlr.hpp"

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "parallel.hpp"
#include "robustlsq/errors.hpp"

namespace robustlsq {

namespace {

using steady = std::chrono::steady_clock;

double seconds_since(steady::time_point start) {
  return std::chrono::duration<double>(steady::now() - start).count();
}

}  // namespace

DrlrReport drlr_fit(const std::vector<MiniBatch>& batches, const HrrConfig& hrr_cfg,
                    const MedianConfig& med_cfg, int threads) {
  const int m = static_cast<int>(batches.size());
  if (m == 0) {
    throw std::invalid_argument("drlr_fit requires at least one batch");
  }
  const Eigen::Index p = batches.front().p();
  for (int i = 0; i < m; ++i) {
    if (batches[static_cast<std::size_t>(i)].p() != p) {
      throw std::invalid_argument("batch " +
                                  std::to_string(batches[static_cast<std::size_t>(i)].id()) +
                                  " has a different feature dimension");
    }
    if (i > 0 && batches[static_cast<std::size_t>(i)].id() <=
                     batches[static_cast<std::size_t>(i) - 1].id()) {
      throw std::invalid_argument("batch ids must be strictly increasing in input order");
    }
  }

  // Per-slot results; numerical failures are recorded instead of thrown so
  // the exclusion policy below can decide their fate.
  std::vector<std::optional<HrrResult>> slots(static_cast<std::size_t>(m));
  std::vector<std::string> failures(static_cast<std::size_t>(m));
  const auto fit_start = steady::now();
  detail::parallel_for(m, threads, [&](int i) {
    try {
      slots[static_cast<std::size_t>(i)] =
          hrr_fit(batches[static_cast<std::size_t>(i)], hrr_cfg);
    } catch (const numerical_error& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  });
  const double fit_seconds = seconds_since(fit_start);

  int survivors = 0;
  for (const auto& slot : slots) {
    if (slot) ++survivors;
  }
  if (survivors < m / 2 + 1) {
    for (int i = 0; i < m; ++i) {
      if (!slots[static_cast<std::size_t>(i)]) {
        throw numerical_error(
            "batch " + std::to_string(batches[static_cast<std::size_t>(i)].id()) +
            " failed and too few batches survive for a majority: " +
            failures[static_cast<std::size_t>(i)]);
      }
    }
  }

  EstimatePool pool(survivors);
  std::vector<HrrResult> per_batch;
  per_batch.reserve(static_cast<std::size_t>(survivors));
  std::vector<std::int64_t> failed_ids;
  for (int i = 0; i < m; ++i) {
    auto& slot = slots[static_cast<std::size_t>(i)];
    if (!slot) {
      failed_ids.push_back(batches[static_cast<std::size_t>(i)].id());
      continue;
    }
    pool.append(batches[static_cast<std::size_t>(i)].id(), slot->beta);
    per_batch.push_back(std::move(*slot));
  }

  const auto consolidate_start = steady::now();
  auto [consolidated, dominating] = consolidate(pool, med_cfg);
  const double consolidate_seconds = seconds_since(consolidate_start);

  return DrlrReport{std::move(consolidated), std::move(pool),     std::move(dominating),
                    std::move(per_batch),    std::move(failed_ids), fit_seconds,
                    consolidate_seconds};
}

}  // namespace robustlsq
