#include "robustlsq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <utility>

#include "parallel.hpp"
#include "robustlsq/drlr.hpp"
#include "robustlsq/errors.hpp"
#include "robustlsq/metrics.hpp"
#include "robustlsq/orlr.hpp"
#include "robustlsq/rng.hpp"

namespace robustlsq {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::drlr: return "drlr";
    case Algorithm::orlr: return "orlr";
    case Algorithm::ols_avg: return "ols-avg";
    case Algorithm::hrr_avg: return "hrr-avg";
  }
  throw std::invalid_argument("unknown algorithm value");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "drlr") return Algorithm::drlr;
  if (name == "orlr") return Algorithm::orlr;
  if (name == "ols-avg") return Algorithm::ols_avg;
  if (name == "hrr-avg") return Algorithm::hrr_avg;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected drlr, orlr, ols-avg, or hrr-avg)");
}

std::string layout_name(const CorruptionLayout& layout) {
  if (const auto* kh = std::get_if<KHeavyLayout>(&layout)) {
    return "k-heavy-" + std::to_string(kh->k);
  }
  return "uniform";
}

namespace {

struct FitOutcome {
  Coefficients beta;
  double seconds = 0.0;
};

FitOutcome fit_algorithm(Algorithm algo, const std::vector<MiniBatch>& batches,
                         const ExperimentConfig& cfg, int fit_threads) {
  const auto start = std::chrono::steady_clock::now();
  Coefficients beta(Eigen::VectorXd::Zero(batches.front().p()));
  switch (algo) {
    case Algorithm::drlr:
      beta = drlr_fit(batches, cfg.hrr_cfg, cfg.med_cfg, fit_threads).consolidated;
      break;
    case Algorithm::orlr: {
      const int warm = std::min<int>(cfg.orlr_pool, static_cast<int>(batches.size()));
      std::vector<MiniBatch> head(batches.begin(), batches.begin() + warm);
      OrlrUpdateResult res =
          orlr_init(head, cfg.orlr_pool, cfg.hrr_cfg, cfg.med_cfg, fit_threads);
      for (std::size_t i = static_cast<std::size_t>(warm); i < batches.size(); ++i) {
        res = orlr_update(res.state, batches[i]);
      }
      beta = std::move(res.consolidated);
      break;
    }
    case Algorithm::ols_avg:
      beta = baseline_ols_avg(batches);
      break;
    case Algorithm::hrr_avg:
      beta = baseline_hrr_avg(batches, cfg.hrr_cfg, fit_threads);
      break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return FitOutcome{std::move(beta), seconds};
}

/// Immutable per-experiment context shared by all runs.
struct CsvContext {
  Eigen::MatrixXd train_x;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd test_x;
  Eigen::VectorXd test_y;
};

struct FileContext {
  Dataset dataset;
};

ResultRow make_row(const ExperimentConfig& cfg, int run, int p, int n, int m, double gamma,
                   const std::string& layout, const std::string& metric, double value) {
  ResultRow row;
  row.run = std::to_string(run);
  row.algo = algorithm_name(cfg.algorithm);
  row.p = p;
  row.n = n;
  row.m = m;
  row.gamma = gamma;
  row.layout = layout;
  row.metric = metric;
  row.value = value;
  return row;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  if (cfg.orlr_pool < 1) {
    throw std::invalid_argument("the online pool capacity must be at least 1");
  }
  if (cfg.threads < 0) {
    throw std::invalid_argument("threads must be nonnegative");
  }
  if (const auto* synth = std::get_if<SynthSource>(&cfg.source)) {
    validate_spec(synth->spec);
  } else if (const auto* file = std::get_if<FileSource>(&cfg.source)) {
    if (file->path.empty()) {
      throw std::invalid_argument("dataset path must not be empty");
    }
  } else if (const auto* csv = std::get_if<CsvSource>(&cfg.source)) {
    if (csv->path.empty()) {
      throw std::invalid_argument("csv path must not be empty");
    }
    if (csv->batch_size < 1) {
      throw std::invalid_argument("csv batch size must be at least 1");
    }
    if (csv->max_batches < 0) {
      throw std::invalid_argument("csv batch limit must be nonnegative");
    }
    if (!(csv->test_fraction >= 0.0) || csv->test_fraction >= 1.0) {
      throw std::invalid_argument("test fraction must lie in [0, 1)");
    }
    if (!(csv->corruption_ratio >= 0.0) || csv->corruption_ratio >= 1.0) {
      throw std::invalid_argument("corruption ratio must lie in [0, 1)");
    }
  }
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<ResultRow>* partial,
                                      std::optional<Coefficients>* run0_estimate) {
  validate_config(cfg);
  const int repeats = cfg.repeats;
  const int budget =
      detail::resolve_threads(cfg.threads, std::numeric_limits<int>::max());
  const int run_workers = std::min(budget, repeats);
  const int fit_threads = std::max(1, budget / run_workers);

  // Shared, read-only data loaded once.
  std::optional<FileContext> file_ctx;
  std::optional<CsvContext> csv_ctx;
  if (const auto* file = std::get_if<FileSource>(&cfg.source)) {
    file_ctx = FileContext{load_dataset(file->path)};
  } else if (const auto* csv = std::get_if<CsvSource>(&cfg.source)) {
    CsvData data = load_csv(csv->path, csv->schema);
    const Eigen::Index total = data.y.size();
    const auto test_count =
        static_cast<Eigen::Index>(std::floor(csv->test_fraction * static_cast<double>(total)));
    const Eigen::Index train_count = total - test_count;
    if (train_count < csv->batch_size) {
      throw data_error(csv->path + ": only " + std::to_string(train_count) +
                       " training rows for batches of " + std::to_string(csv->batch_size));
    }
    if (csv->test_fraction > 0.0 && test_count == 0) {
      throw data_error(csv->path + ": holdout fraction selects zero rows");
    }
    CsvContext ctx;
    ctx.train_x = data.x.leftCols(train_count);
    ctx.train_y = data.y.head(train_count);
    ctx.test_x = data.x.rightCols(test_count);
    ctx.test_y = data.y.tail(test_count);
    csv_ctx = std::move(ctx);
  }

  std::vector<std::vector<ResultRow>> per_run(static_cast<std::size_t>(repeats));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(repeats));
  std::optional<Coefficients> first_estimate;

  detail::parallel_for(repeats, run_workers, [&](int run) {
    try {
      std::vector<ResultRow>& rows = per_run[static_cast<std::size_t>(run)];
      if (const auto* synth = std::get_if<SynthSource>(&cfg.source)) {
        SynthSpec spec = synth->spec;
        spec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(run));
        GroundTruth truth = gen_ground_truth(spec);
        std::vector<MiniBatch> batches = gen_batches(spec, truth, fit_threads);
        FitOutcome fit = fit_algorithm(cfg.algorithm, batches, cfg, fit_threads);
        if (run == 0) first_estimate = fit.beta;
        const std::string layout = layout_name(spec.layout);
        rows.push_back(make_row(cfg, run, spec.p, spec.n, spec.m, spec.gamma, layout,
                                "l2_error", l2_error(fit.beta, truth.beta_star)));
        rows.push_back(make_row(cfg, run, spec.p, spec.n, spec.m, spec.gamma, layout,
                                "fit_seconds", fit.seconds));
      } else if (std::get_if<FileSource>(&cfg.source) != nullptr) {
        const Dataset& dataset = file_ctx->dataset;
        FitOutcome fit = fit_algorithm(cfg.algorithm, dataset.batches, cfg, fit_threads);
        if (run == 0) first_estimate = fit.beta;
        const std::string layout = layout_name(dataset.spec.layout);
        if (dataset.truth) {
          rows.push_back(make_row(cfg, run, dataset.spec.p, dataset.spec.n, dataset.spec.m,
                                  dataset.spec.gamma, layout, "l2_error",
                                  l2_error(fit.beta, dataset.truth->beta_star)));
        }
        rows.push_back(make_row(cfg, run, dataset.spec.p, dataset.spec.n, dataset.spec.m,
                                dataset.spec.gamma, layout, "fit_seconds", fit.seconds));
      } else {
        const auto* csv = std::get_if<CsvSource>(&cfg.source);
        const CsvContext& ctx = *csv_ctx;
        Eigen::VectorXd train_y = ctx.train_y;
        if (csv->corruption_ratio > 0.0) {
          train_y = inject_corruption(ctx.train_y, csv->corruption_ratio,
                                      derive_seed(cfg.seed, static_cast<std::uint64_t>(run)))
                        .first;
        }
        std::vector<MiniBatch> batches =
            split_batches(ctx.train_x, train_y, csv->batch_size, SplitOrder::sequential);
        if (csv->max_batches > 0 &&
            static_cast<int>(batches.size()) > csv->max_batches) {
          batches.erase(batches.begin() + csv->max_batches, batches.end());
        }
        FitOutcome fit = fit_algorithm(cfg.algorithm, batches, cfg, fit_threads);
        if (run == 0) first_estimate = fit.beta;
        const int p = static_cast<int>(ctx.train_x.rows());
        const int m = static_cast<int>(batches.size());
        std::vector<ResultRow>& out = rows;
        if (ctx.test_y.size() > 0) {
          MiniBatch test(ctx.test_x, ctx.test_y, 0);
          const double err = mae(predict(test, fit.beta), ctx.test_y);
          out.push_back(make_row(cfg, run, p, csv->batch_size, m, csv->corruption_ratio,
                                 "csv", "mae", err));
        }
        out.push_back(make_row(cfg, run, p, csv->batch_size, m, csv->corruption_ratio,
                               "csv", "fit_seconds", fit.seconds));
      }
    } catch (...) {
      failures[static_cast<std::size_t>(run)] = std::current_exception();
    }
  });

  for (int run = 0; run < repeats; ++run) {
    if (failures[static_cast<std::size_t>(run)]) {
      if (partial != nullptr) {
        partial->clear();
        for (int ok = 0; ok < repeats; ++ok) {
          if (!failures[static_cast<std::size_t>(ok)]) {
            partial->insert(partial->end(), per_run[static_cast<std::size_t>(ok)].begin(),
                            per_run[static_cast<std::size_t>(ok)].end());
          }
        }
      }
      std::rethrow_exception(failures[static_cast<std::size_t>(run)]);
    }
  }

  if (run0_estimate != nullptr) *run0_estimate = first_estimate;
  std::vector<ResultRow> rows;
  for (const auto& batch_rows : per_run) {
    rows.insert(rows.end(), batch_rows.begin(), batch_rows.end());
  }

  // Summary rows per metric, in first-appearance order.
  std::vector<std::string> metric_order;
  for (const ResultRow& row : rows) {
    if (std::find(metric_order.begin(), metric_order.end(), row.metric) ==
        metric_order.end()) {
      metric_order.push_back(row.metric);
    }
  }
  for (const std::string& metric : metric_order) {
    const ResultRow* sample = nullptr;
    double sum = 0.0;
    int count = 0;
    for (const ResultRow& row : rows) {
      if (row.metric == metric) {
        sample = &row;
        sum += row.value;
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (const ResultRow& row : rows) {
      if (row.metric == metric) sq += (row.value - mean) * (row.value - mean);
    }
    const double stddev =
        count > 1 ? std::sqrt(sq / static_cast<double>(count - 1)) : 0.0;
    ResultRow mean_row = *sample;
    mean_row.run = "mean";
    mean_row.value = mean;
    ResultRow sd_row = *sample;
    sd_row.run = "stddev";
    sd_row.value = stddev;
    rows.push_back(std::move(mean_row));
    rows.push_back(std::move(sd_row));
  }
  return rows;
}

namespace {

int run_rank(const std::string& run) {
  if (run == "mean") return 1;
  if (run == "stddev") return 2;
  return 0;
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  const int ra = run_rank(a.run);
  const int rb = run_rank(b.run);
  if (ra != rb) return ra < rb;
  if (ra == 0 && a.run != b.run) {
    const long long na = std::stoll(a.run);
    const long long nb = std::stoll(b.run);
    if (na != nb) return na < nb;
  }
  if (a.algo != b.algo) return a.algo < b.algo;
  if (a.p != b.p) return a.p < b.p;
  if (a.n != b.n) return a.n < b.n;
  if (a.m != b.m) return a.m < b.m;
  if (a.gamma != b.gamma) return a.gamma < b.gamma;
  if (a.layout != b.layout) return a.layout < b.layout;
  return a.metric < b.metric;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_row(const ResultRow& row) {
  if (!std::isfinite(row.value) || row.value < 0.0) {
    throw std::invalid_argument("metric " + row.metric + " has value " +
                                format_double(row.value) + "; finite nonnegative required");
  }
  if (row.metric != "l2_error" && row.metric != "mae" && row.metric != "fit_seconds") {
    throw std::invalid_argument("unknown metric name '" + row.metric + "'");
  }
  for (const std::string* field : {&row.run, &row.algo, &row.layout}) {
    if (field->empty() || field->find(',') != std::string::npos ||
        field->find('\n') != std::string::npos) {
      throw std::invalid_argument("row field '" + *field + "' is empty or not CSV-safe");
    }
  }
}

}  // namespace

std::string results_to_csv(std::vector<ResultRow> rows) {
  for (const ResultRow& row : rows) validate_row(row);
  std::stable_sort(rows.begin(), rows.end(), row_less);
  std::string out = "run,algo,p,n,m,gamma,layout,metric,value\n";
  for (const ResultRow& row : rows) {
    out += row.run;
    out += ',';
    out += row.algo;
    out += ',';
    out += std::to_string(row.p);
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.m);
    out += ',';
    out += format_double(row.gamma);
    out += ',';
    out += row.layout;
    out += ',';
    out += row.metric;
    out += ',';
    out += format_double(row.value);
    out += '\n';
  }
  return out;
}

void write_results_csv(const std::string& path, std::vector<ResultRow> rows) {
  const std::string text = results_to_csv(std::move(rows));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw data_error("cannot open " + path + " for writing");
  }
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  file.flush();
  if (!file) {
    throw data_error("write failed: " + path);
  }
}

int default_thread_budget() {
  const char* value = std::getenv("ROBUST_LSQ_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || parsed < 0) return 0;
  return static_cast<int>(parsed);
}

}  // namespace robustlsq
