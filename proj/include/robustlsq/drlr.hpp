#ifndef ROBUSTLSQ_DRLR_HPP_
#define ROBUSTLSQ_DRLR_HPP_

#include <cstdint>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/consolidation.hpp"
#include "robustlsq/hrr.hpp"

namespace robustlsq {

/// Outcome of the distributed fit. pool and per_batch stay index-aligned;
/// both cover exactly the batches whose per-batch fit succeeded (all of them
/// unless a numerically failing batch was excluded, see drlr_fit).
struct DrlrReport {
  Coefficients consolidated;
  EstimatePool pool;
  DominatingSet dominating;
  std::vector<HrrResult> per_batch;
  std::vector<std::int64_t> failed_batch_ids;
  double fit_seconds = 0.0;
  double consolidate_seconds = 0.0;
};

/// Fits every batch independently (parallel over up to `threads` workers,
/// 0 = available parallelism), pools the estimates in batch order, and
/// robustly consolidates. Deterministic regardless of scheduling: each fit
/// lands in its own slot and the pool keeps input order.
///
/// Batches must share one feature dimension and carry strictly increasing
/// ids. A batch whose fit fails numerically is excluded, provided at least
/// floor(m/2)+1 batches survive; otherwise the error propagates with the
/// failing batch id.
DrlrReport drlr_fit(const std::vector<MiniBatch>& batches,
                    const HrrConfig& hrr_cfg = HrrConfig{},
                    const MedianConfig& med_cfg = MedianConfig{}, int threads = 0);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_DRLR_HPP_
