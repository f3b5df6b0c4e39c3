// Internal helper: index-parallel map with per-slot results, so outputs are
// identical regardless of scheduling. Not part of the public API.
#ifndef ROBUSTLSQ_SRC_PARALLEL_HPP_
#define ROBUSTLSQ_SRC_PARALLEL_HPP_

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace robustlsq::detail {

inline int resolve_threads(int requested, int jobs) {
  int threads = requested;
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  if (threads > jobs) threads = jobs;
  return threads < 1 ? 1 : threads;
}

// Runs fn(i) for every i in [0, jobs) on up to `threads` workers. Each index
// is processed exactly once; fn must write only to its own slot. The first
// exception (by lowest index) is rethrown after all workers finish.
template <typename Fn>
void parallel_for(int jobs, int threads, Fn&& fn) {
  threads = resolve_threads(threads, jobs);
  if (jobs <= 0) return;
  if (threads == 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace robustlsq::detail

#endif  // ROBUSTLSQ_SRC_PARALLEL_HPP_
