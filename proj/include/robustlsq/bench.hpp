#ifndef ROBUSTLSQ_BENCH_HPP_
#define ROBUSTLSQ_BENCH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "robustlsq/batch.hpp"
#include "robustlsq/consolidation.hpp"
#include "robustlsq/data_io.hpp"
#include "robustlsq/datagen.hpp"
#include "robustlsq/hrr.hpp"

namespace robustlsq {

enum class Algorithm { drlr, orlr, ols_avg, hrr_avg };

/// Stable CSV / CLI spelling: "drlr", "orlr", "ols-avg", "hrr-avg".
std::string algorithm_name(Algorithm a);

/// Stable CSV layout-column spelling: "uniform" or "k-heavy-<k>".
std::string layout_name(const CorruptionLayout& layout);

/// Inverse of algorithm_name; throws std::invalid_argument on unknown names.
Algorithm parse_algorithm(const std::string& name);

/// Fresh synthetic data every run: run r regenerates the spec with seed
/// derive_seed(experiment seed, r). The spec's own seed field is ignored.
struct SynthSource {
  SynthSpec spec;
};

/// A dataset file written by save_dataset; every run fits the same batches.
/// Recovery error is reported only when the file carries ground truth.
struct FileSource {
  std::string path;
};

/// Delimited text data. Rows keep file order: the trailing test_fraction of
/// usable rows is held out for evaluation, the front is chunked into
/// training batches. Each run re-draws the injected corruption (ratio
/// corruption_ratio over the training responses) with a run-derived seed and
/// reports the mean absolute error of the fit on the untouched holdout.
struct CsvSource {
  std::string path;
  CsvSchema schema;
  int batch_size = 0;
  int max_batches = 0;  // 0 = as many full batches as the training rows allow
  double test_fraction = 0.2;
  double corruption_ratio = 0.0;
};

using DataSource = std::variant<SynthSource, FileSource, CsvSource>;

struct ExperimentConfig {
  DataSource source;
  Algorithm algorithm = Algorithm::drlr;
  HrrConfig hrr_cfg;
  MedianConfig med_cfg;
  int orlr_pool = 7;  // rolling window capacity for the online fit
  int repeats = 1;
  std::uint64_t seed = 0;
  int threads = 0;  // worker budget; 0 = available parallelism
};

/// One output record. run holds the zero-based run id, or "mean" / "stddev"
/// for the summary rows appended after the per-run rows. metric is one of
/// "l2_error", "mae", "fit_seconds"; values are finite and nonnegative.
struct ResultRow {
  std::string run;
  std::string algo;
  int p = 0;
  int n = 0;
  int m = 0;
  double gamma = 0.0;
  std::string layout;
  std::string metric;
  double value = 0.0;
};

/// Throws std::invalid_argument when the config cannot be run as given
/// (repeats < 1, bad source parameters, inconsistent layout budget, ...).
void validate_config(const ExperimentConfig& cfg);

/// Executes repeats seeded runs (parallel across runs up to the thread
/// budget, remaining workers shared by each run's fit) and returns per-run
/// metric rows plus mean/stddev summary rows per metric. Only fit_seconds
/// depends on the machine; every other value is deterministic in the seed.
/// On failure the rows of the runs that completed are stashed in *partial
/// (when given) before the error propagates. *run0_estimate (when given)
/// receives the consolidated coefficients of run 0, e.g. for saving the fit.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<ResultRow>* partial = nullptr,
                                      std::optional<Coefficients>* run0_estimate = nullptr);

/// Renders rows as CSV: header run,algo,p,n,m,gamma,layout,metric,value,
/// LF line endings, floats with 17 significant digits, rows sorted by
/// (run, algo, p, n, m, gamma, layout, metric) with summary rows last, so
/// equal inputs give byte-equal output. Validates every row.
std::string results_to_csv(std::vector<ResultRow> rows);

/// results_to_csv straight to a file; data_error when the path cannot be
/// written.
void write_results_csv(const std::string& path, std::vector<ResultRow> rows);

/// Worker budget from the ROBUST_LSQ_THREADS environment variable; 0 (use
/// available parallelism) when unset or unparseable.
int default_thread_budget();

}  // namespace robustlsq

#endif  // ROBUSTLSQ_BENCH_HPP_
