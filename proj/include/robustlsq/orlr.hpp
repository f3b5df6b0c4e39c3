#ifndef ROBUSTLSQ_ORLR_HPP_
#define ROBUSTLSQ_ORLR_HPP_

#include <cstdint>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/consolidation.hpp"
#include "robustlsq/drlr.hpp"
#include "robustlsq/hrr.hpp"

namespace robustlsq {

/// Rolling window over the most recent per-batch estimates. The pool is kept
/// in age order (strictly increasing batch ids) and the dominating set is
/// always the one recomputed from the current pool. Updates must be
/// externally serialized; snapshots are safe to read concurrently.
struct OrlrState {
  EstimatePool pool;
  DominatingSet dominating;
  std::int64_t next_batch_id = 0;
  HrrConfig hrr_cfg;
  MedianConfig med_cfg;
};

/// Consolidated estimate after one step together with the advanced state.
struct OrlrUpdateResult {
  Coefficients consolidated;
  OrlrState state;
};

/// Bootstraps the state from a distributed fit over the initial batches.
/// capacity bounds the rolling pool (>= batches.size()); later updates evict
/// once the pool is full.
OrlrUpdateResult orlr_init(const std::vector<MiniBatch>& batches, int capacity,
                           const HrrConfig& hrr_cfg = HrrConfig{},
                           const MedianConfig& med_cfg = MedianConfig{},
                           int threads = 0);

/// Admits an externally computed estimate through the swap rule: when the
/// pool is full, evict the oldest member outside the dominating set (the
/// oldest member overall if every member is dominating, which can only
/// happen at capacity <= 2), append the new estimate, then recompute the
/// dominating set and consolidate.
OrlrUpdateResult admit_estimate(const OrlrState& state, const Coefficients& beta);

/// Fits the new batch with the state's HRR config, then admits the estimate.
/// The batch id must be >= the state's next_batch_id; gaps are allowed and
/// the stream position jumps past them.
OrlrUpdateResult orlr_update(const OrlrState& state, const MiniBatch& new_batch);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_ORLR_HPP_
