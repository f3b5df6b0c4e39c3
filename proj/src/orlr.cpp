#include "robustlsq/orlr.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace robustlsq {

OrlrUpdateResult orlr_init(const std::vector<MiniBatch>& batches, int capacity,
                           const HrrConfig& hrr_cfg, const MedianConfig& med_cfg,
                           int threads) {
  if (capacity < static_cast<int>(batches.size())) {
    throw std::invalid_argument("pool capacity " + std::to_string(capacity) +
                                " is smaller than the " +
                                std::to_string(batches.size()) + " initial batches");
  }
  DrlrReport report = drlr_fit(batches, hrr_cfg, med_cfg, threads);

  EstimatePool pool(capacity);
  for (int i = 0; i < report.pool.size(); ++i) {
    pool.append(report.pool.batch_id(i), report.pool.estimate(i));
  }
  const std::int64_t next_id = pool.batch_id(pool.size() - 1) + 1;
  OrlrState state{std::move(pool), std::move(report.dominating), next_id, hrr_cfg,
                  med_cfg};
  return {std::move(report.consolidated), std::move(state)};
}

OrlrUpdateResult admit_estimate(const OrlrState& state, const Coefficients& beta) {
  if (state.pool.size() == 0) {
    throw std::invalid_argument("cannot admit an estimate into an empty state");
  }
  if (beta.dim() != state.pool.dim()) {
    throw std::invalid_argument("estimate dimension does not match the pool");
  }

  EstimatePool pool = state.pool;
  if (pool.size() == pool.capacity()) {
    // Oldest member outside the previous dominating set; the pool is
    // age-ordered, so the first non-dominating position is the oldest. Every
    // member can be dominating only when capacity <= 2, where the window
    // degenerates to plain eviction of the oldest.
    int victim = 0;
    for (int pos = 0; pos < pool.size(); ++pos) {
      if (!state.dominating.contains(pos)) {
        victim = pos;
        break;
      }
    }
    pool.remove(victim);
  }
  pool.append(state.next_batch_id, beta);

  auto [consolidated, dominating] = consolidate(pool, state.med_cfg);
  OrlrState next{std::move(pool), std::move(dominating), state.next_batch_id + 1,
                 state.hrr_cfg, state.med_cfg};
  return {std::move(consolidated), std::move(next)};
}

OrlrUpdateResult orlr_update(const OrlrState& state, const MiniBatch& new_batch) {
  if (new_batch.id() < state.next_batch_id) {
    throw std::invalid_argument("batch id " + std::to_string(new_batch.id()) +
                                " is older than the stream position " +
                                std::to_string(state.next_batch_id));
  }
  HrrResult fit = hrr_fit(new_batch, state.hrr_cfg);
  OrlrState aligned = state;
  aligned.next_batch_id = new_batch.id();
  return admit_estimate(aligned, fit.beta);
}

}  // namespace robustlsq
