// robust-lsq: command line harness around the robustlsq library.
//
// Subcommands share a JSON config file plus flag overrides; flags win over
// file values. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robustlsq/batch.hpp"
#include "robustlsq/bench.hpp"
#include "robustlsq/data_io.hpp"
#include "robustlsq/datagen.hpp"
#include "robustlsq/errors.hpp"
#include "robustlsq/metrics.hpp"

namespace {

using nlohmann::json;
using namespace robustlsq;

// ---------------------------------------------------------------------------
// JSON helpers. Unreadable or unparseable files are data errors; a parseable
// file whose values make no sense for the run is a usage error.

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw data_error(std::string(what) + " file not readable: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
}

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) {
    throw std::invalid_argument(what + " must be a JSON object");
  }
}

void require_keys(const json& obj, const std::string& what,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(what + ": unknown key \"" + it.key() + "\"");
    }
  }
}

double get_number(const json& obj, const std::string& what, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw std::invalid_argument(what + "." + key + " must be a number");
  }
  return v.get<double>();
}

int get_int(const json& obj, const std::string& what, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(what + "." + key + " must be an integer");
  }
  const auto wide = v.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw std::invalid_argument(what + "." + key + " is out of range");
  }
  return static_cast<int>(wide);
}

std::uint64_t get_seed(const json& obj, const std::string& what, const char* key,
                       std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw std::invalid_argument(what + "." + key + " must be a nonnegative integer");
}

std::string get_string(const json& obj, const std::string& what, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw std::invalid_argument(what + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& what, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw std::invalid_argument(what + "." + key + " must be a boolean");
  }
  return v.get<bool>();
}

// ---------------------------------------------------------------------------
// Config-file fragments shared by the subcommands.

/// Synthetic-data spec from a config object. Callers validate the allowed
/// key set (they differ on extras like with_truth). When the layout is
/// k-heavy and the config carries no explicit gamma, gamma is derived from
/// the layout so the budget is consistent by construction.
SynthSpec spec_from_json(const json& j, const std::string& what, bool* gamma_in_config) {
  require_object(j, what);
  SynthSpec spec;
  spec.p = get_int(j, what, "p", spec.p);
  spec.n = get_int(j, what, "n", spec.n);
  spec.m = get_int(j, what, "m", spec.m);
  spec.sigma = get_number(j, what, "sigma", spec.sigma);
  spec.seed = get_seed(j, what, "seed", spec.seed);
  if (j.contains("layout")) {
    const json& l = j.at("layout");
    require_object(l, what + ".layout");
    const std::string type = get_string(l, what + ".layout", "type", "uniform");
    if (type == "uniform") {
      require_keys(l, what + ".layout", {"type"});
      spec.layout = UniformRatiosLayout{};
    } else if (type == "k-heavy") {
      require_keys(l, what + ".layout", {"type", "k", "heavy_ratio", "light_ratio"});
      KHeavyLayout kh;
      kh.k = get_int(l, what + ".layout", "k", kh.k);
      kh.heavy_ratio = get_number(l, what + ".layout", "heavy_ratio", kh.heavy_ratio);
      kh.light_ratio = get_number(l, what + ".layout", "light_ratio", kh.light_ratio);
      spec.layout = kh;
    } else {
      throw std::invalid_argument(what + ".layout.type must be \"uniform\" or \"k-heavy\"");
    }
  }
  const bool has_gamma = j.contains("gamma");
  if (gamma_in_config != nullptr) *gamma_in_config = has_gamma;
  if (has_gamma) {
    spec.gamma = get_number(j, what, "gamma", spec.gamma);
  } else if (const auto* kh = std::get_if<KHeavyLayout>(&spec.layout);
             kh != nullptr && spec.n > 0 && spec.m > 0) {
    spec.gamma = k_heavy_gamma(*kh, spec.n, spec.m);
  }
  return spec;
}

HrrConfig hrr_from_json(const json& cfg) {
  HrrConfig h;
  if (!cfg.contains("hrr")) return h;
  const json& j = cfg.at("hrr");
  require_object(j, "hrr");
  require_keys(j, "hrr", {"tolerance", "max_iterations", "ridge_fallback"});
  h.tolerance_eps = get_number(j, "hrr", "tolerance", h.tolerance_eps);
  h.max_iterations = get_int(j, "hrr", "max_iterations", h.max_iterations);
  h.ridge_fallback = get_number(j, "hrr", "ridge_fallback", h.ridge_fallback);
  return h;
}

MedianConfig median_from_json(const json& cfg) {
  MedianConfig m;
  if (!cfg.contains("median")) return m;
  const json& j = cfg.at("median");
  require_object(j, "median");
  require_keys(j, "median", {"max_iterations", "step_tolerance", "singularity_epsilon"});
  m.max_iterations = get_int(j, "median", "max_iterations", m.max_iterations);
  m.step_tolerance = get_number(j, "median", "step_tolerance", m.step_tolerance);
  m.singularity_epsilon =
      get_number(j, "median", "singularity_epsilon", m.singularity_epsilon);
  return m;
}

/// Column schema for delimited text input. Semantic problems in a schema
/// file are data errors: the file describes the data, not the run.
CsvSchema schema_from_json(const std::string& path) {
  const json j = load_json_file(path, "schema");
  if (!j.is_object()) throw data_error(path + ": schema root must be a JSON object");
  try {
    require_keys(j, "schema", {"target", "features", "delimiter"});
    CsvSchema schema;
    schema.target_column = get_string(j, "schema", "target", "");
    if (schema.target_column.empty()) {
      throw std::invalid_argument("schema.target must be a nonempty string");
    }
    if (!j.contains("features") || !j.at("features").is_array() ||
        j.at("features").empty()) {
      throw std::invalid_argument("schema.features must be a nonempty array of column names");
    }
    for (const json& f : j.at("features")) {
      if (!f.is_string()) {
        throw std::invalid_argument("schema.features entries must be strings");
      }
      schema.feature_columns.push_back(f.get<std::string>());
    }
    const std::string delim = get_string(j, "schema", "delimiter", ",");
    if (delim.size() != 1) {
      throw std::invalid_argument("schema.delimiter must be a single character");
    }
    schema.delimiter = delim[0];
    return schema;
  } catch (const std::invalid_argument& e) {
    throw data_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Estimate files: the bridge between `fit --save-estimate` and `eval`.

void write_estimate_json(const std::string& path, const std::string& algo,
                         const Coefficients& beta) {
  json j;
  j["algo"] = algo;
  j["coefficients"] =
      std::vector<double>(beta.vec().data(), beta.vec().data() + beta.dim());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write estimate file: " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw data_error("failed writing estimate file: " + path);
}

std::pair<std::string, Coefficients> load_estimate_json(const std::string& path) {
  const json j = load_json_file(path, "estimate");
  if (!j.is_object() || !j.contains("coefficients")) {
    throw data_error(path + ": estimate file needs a \"coefficients\" array");
  }
  const json& c = j.at("coefficients");
  if (!c.is_array() || c.empty()) {
    throw data_error(path + ": \"coefficients\" must be a nonempty array of numbers");
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (const json& v : c) {
    if (!v.is_number()) {
      throw data_error(path + ": \"coefficients\" must be a nonempty array of numbers");
    }
    beta[i++] = v.get<double>();
  }
  std::string algo = "estimate";
  if (j.contains("algo")) {
    if (!j.at("algo").is_string()) throw data_error(path + ": \"algo\" must be a string");
    algo = j.at("algo").get<std::string>();
  }
  return {algo, Coefficients(std::move(beta))};
}

// ---------------------------------------------------------------------------
// Flag overrides. Presence is tracked through the CLI11 option pointers so a
// flag can override a config value even when it equals the default.

struct Overrides {
  std::uint64_t seed = 0;
  int repeats = 1;
  int threads = 0;
  int batch_size = 0;
  int batches = 0;
  double corruption = 0.0;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* repeats_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* batch_size_opt = nullptr;
  CLI::Option* batches_opt = nullptr;
  CLI::Option* corruption_opt = nullptr;

  static bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }
  bool has_seed() const { return given(seed_opt); }
  bool has_repeats() const { return given(repeats_opt); }
  bool has_threads() const { return given(threads_opt); }
  bool has_batch_size() const { return given(batch_size_opt); }
  bool has_batches() const { return given(batches_opt); }
  bool has_corruption() const { return given(corruption_opt); }
};

void add_override_flags(CLI::App* sub, Overrides& o, bool with_repeats) {
  o.seed_opt = sub->add_option("--seed", o.seed, "override the experiment seed");
  o.threads_opt =
      sub->add_option("--threads", o.threads,
                      "worker budget (default: ROBUST_LSQ_THREADS, else all cores)");
  o.batch_size_opt =
      sub->add_option("--batch-size", o.batch_size, "override samples per batch");
  o.batches_opt = sub->add_option("--batches", o.batches, "override the batch count");
  o.corruption_opt = sub->add_option("--corruption-ratio", o.corruption,
                                     "override the corruption ratio");
  if (with_repeats) {
    o.repeats_opt = sub->add_option("--repeats", o.repeats, "number of seeded runs");
  }
}

/// n / m / gamma / seed overrides on a synthetic spec. gamma tracks the
/// layout for k-heavy specs unless the config pinned it explicitly.
void apply_spec_overrides(SynthSpec& spec, const Overrides& o, bool gamma_in_config) {
  if (o.has_batch_size()) spec.n = o.batch_size;
  if (o.has_batches()) spec.m = o.batches;
  if (o.has_seed()) spec.seed = o.seed;
  const auto* kh = std::get_if<KHeavyLayout>(&spec.layout);
  if (o.has_corruption()) {
    if (kh != nullptr) {
      throw std::invalid_argument(
          "--corruption-ratio does not apply to a k-heavy layout; "
          "gamma follows from the per-batch counts");
    }
    spec.gamma = o.corruption;
  } else if (kh != nullptr && !gamma_in_config && spec.n > 0 && spec.m > 0) {
    spec.gamma = k_heavy_gamma(*kh, spec.n, spec.m);
  }
}

int resolve_thread_budget(const json& cfg, const Overrides& o) {
  if (o.has_threads()) return o.threads;
  if (cfg.contains("threads")) return get_int(cfg, "config", "threads", 0);
  return default_thread_budget();
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

void cmd_gen(const std::string& config_path, const std::string& out_path,
             const Overrides& o) {
  const json cfg = load_json_file(config_path, "config");
  require_object(cfg, "config");
  require_keys(cfg, "config",
               {"p", "n", "m", "gamma", "sigma", "seed", "layout", "with_truth"});
  bool gamma_in_config = false;
  SynthSpec spec = spec_from_json(cfg, "config", &gamma_in_config);
  apply_spec_overrides(spec, o, gamma_in_config);
  const bool with_truth = get_bool(cfg, "config", "with_truth", true);
  validate_spec(spec);

  const int threads = resolve_thread_budget(cfg, o);
  GroundTruth truth = gen_ground_truth(spec);
  const std::vector<MiniBatch> batches = gen_batches(spec, truth, threads);
  save_dataset(out_path, spec, batches,
               with_truth ? std::optional<GroundTruth>(std::move(truth)) : std::nullopt);
  std::cout << "wrote " << out_path << ": p=" << spec.p << " n=" << spec.n
            << " m=" << spec.m << " gamma=" << spec.gamma
            << (with_truth ? "" : " (no ground truth)") << '\n';
}

/// Runs one experiment config, writing whatever rows completed if a run
/// throws, so a failed job still leaves its finished work on disk.
std::vector<ResultRow> run_and_write(const ExperimentConfig& cfg,
                                     const std::string& out_path,
                                     std::vector<ResultRow> done_rows,
                                     std::optional<Coefficients>* run0_estimate) {
  std::vector<ResultRow> partial;
  try {
    std::vector<ResultRow> rows = run_experiment(cfg, &partial, run0_estimate);
    done_rows.insert(done_rows.end(), rows.begin(), rows.end());
    return done_rows;
  } catch (...) {
    done_rows.insert(done_rows.end(), partial.begin(), partial.end());
    if (!done_rows.empty()) {
      try {
        write_results_csv(out_path, done_rows);
        std::cerr << "partial results (" << done_rows.size() << " rows) written to "
                  << out_path << '\n';
      } catch (...) {
        // The original failure is the one worth reporting.
      }
    }
    throw;
  }
}

void cmd_fit(const std::string& config_path, const std::string& algo_flag,
             const std::string& data_path, const std::string& csv_path,
             const std::string& schema_path, const std::string& out_path,
             const std::string& save_estimate_path, const Overrides& o) {
  const json cfg =
      config_path.empty() ? json::object() : load_json_file(config_path, "config");
  require_object(cfg, "config");
  require_keys(cfg, "config",
               {"algo", "repeats", "seed", "threads", "orlr_pool", "hrr", "median", "csv"});

  ExperimentConfig ec;
  const std::string algo_name_str =
      !algo_flag.empty() ? algo_flag : get_string(cfg, "config", "algo", "");
  if (algo_name_str.empty()) {
    throw std::invalid_argument("no algorithm: pass --algo or set \"algo\" in the config");
  }
  ec.algorithm = parse_algorithm(algo_name_str);
  ec.hrr_cfg = hrr_from_json(cfg);
  ec.med_cfg = median_from_json(cfg);
  ec.orlr_pool = get_int(cfg, "config", "orlr_pool", ec.orlr_pool);
  ec.repeats = o.has_repeats() ? o.repeats : get_int(cfg, "config", "repeats", 1);
  ec.seed = o.has_seed() ? o.seed : get_seed(cfg, "config", "seed", 0);
  ec.threads = resolve_thread_budget(cfg, o);

  if (!data_path.empty()) {
    if (o.has_batch_size() || o.has_batches() || o.has_corruption()) {
      throw std::invalid_argument(
          "--batch-size/--batches/--corruption-ratio apply to --csv input only");
    }
    ec.source = FileSource{data_path};
  } else {
    CsvSource src;
    src.path = csv_path;
    src.schema = schema_from_json(schema_path);
    const json csv_cfg = cfg.contains("csv") ? cfg.at("csv") : json::object();
    require_object(csv_cfg, "csv");
    require_keys(csv_cfg, "csv",
                 {"batch_size", "batches", "test_fraction", "corruption_ratio"});
    src.batch_size =
        o.has_batch_size() ? o.batch_size : get_int(csv_cfg, "csv", "batch_size", 0);
    if (src.batch_size <= 0) {
      throw std::invalid_argument(
          "csv input needs a positive batch size (--batch-size or csv.batch_size)");
    }
    src.max_batches = o.has_batches() ? o.batches : get_int(csv_cfg, "csv", "batches", 0);
    src.test_fraction = get_number(csv_cfg, "csv", "test_fraction", src.test_fraction);
    src.corruption_ratio = o.has_corruption()
                               ? o.corruption
                               : get_number(csv_cfg, "csv", "corruption_ratio", 0.0);
    ec.source = src;
  }

  validate_config(ec);
  std::optional<Coefficients> estimate;
  const std::vector<ResultRow> rows = run_and_write(ec, out_path, {}, &estimate);
  write_results_csv(out_path, rows);
  if (!save_estimate_path.empty()) {
    write_estimate_json(save_estimate_path, algorithm_name(ec.algorithm), *estimate);
  }
  std::cout << "wrote " << out_path << " (" << rows.size() << " rows)" << '\n';
}

std::vector<double> get_number_list(const json& cfg, const char* key) {
  std::vector<double> values;
  const json& arr = cfg.at(key);
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument(std::string("config.") + key +
                                " must be a nonempty array of numbers");
  }
  for (const json& v : arr) {
    if (!v.is_number()) {
      throw std::invalid_argument(std::string("config.") + key +
                                  " must be a nonempty array of numbers");
    }
    values.push_back(v.get<double>());
  }
  return values;
}

std::vector<int> get_int_list(const json& cfg, const char* key) {
  std::vector<int> values;
  const json& arr = cfg.at(key);
  if (!arr.is_array() || arr.empty()) {
    throw std::invalid_argument(std::string("config.") + key +
                                " must be a nonempty array of integers");
  }
  for (const json& v : arr) {
    if (!v.is_number_integer()) {
      throw std::invalid_argument(std::string("config.") + key +
                                  " must be a nonempty array of integers");
    }
    values.push_back(static_cast<int>(v.get<std::int64_t>()));
  }
  return values;
}

void cmd_sweep(const std::string& config_path, const std::string& out_path,
               const Overrides& o) {
  const json cfg = load_json_file(config_path, "config");
  require_object(cfg, "config");
  require_keys(cfg, "config",
               {"base", "algos", "gammas", "ns", "ms", "ks", "repeats", "seed", "threads",
                "orlr_pool", "hrr", "median"});
  if (!cfg.contains("base")) {
    throw std::invalid_argument("sweep config needs a \"base\" spec object");
  }
  bool gamma_in_config = false;
  const json& base_cfg = cfg.at("base");
  require_object(base_cfg, "base");
  require_keys(base_cfg, "base", {"p", "n", "m", "gamma", "sigma", "seed", "layout"});
  const SynthSpec base = spec_from_json(base_cfg, "base", &gamma_in_config);

  if (!cfg.contains("algos")) {
    throw std::invalid_argument("sweep config needs an \"algos\" array");
  }
  std::vector<Algorithm> algos;
  {
    const json& arr = cfg.at("algos");
    if (!arr.is_array() || arr.empty()) {
      throw std::invalid_argument("config.algos must be a nonempty array of algorithm names");
    }
    for (const json& a : arr) {
      if (!a.is_string()) {
        throw std::invalid_argument("config.algos must be a nonempty array of algorithm names");
      }
      algos.push_back(parse_algorithm(a.get<std::string>()));
    }
  }

  const auto* base_kh = std::get_if<KHeavyLayout>(&base.layout);
  std::vector<int> ns = cfg.contains("ns") ? get_int_list(cfg, "ns")
                                           : std::vector<int>{base.n};
  std::vector<int> ms = cfg.contains("ms") ? get_int_list(cfg, "ms")
                                           : std::vector<int>{base.m};
  std::vector<double> gammas;
  std::vector<int> ks;
  if (base_kh != nullptr) {
    if (cfg.contains("gammas")) {
      throw std::invalid_argument(
          "a k-heavy sweep varies \"ks\"; gamma follows from the layout");
    }
    ks = cfg.contains("ks") ? get_int_list(cfg, "ks") : std::vector<int>{base_kh->k};
    if (o.has_corruption()) {
      throw std::invalid_argument(
          "--corruption-ratio does not apply to a k-heavy layout; "
          "gamma follows from the per-batch counts");
    }
  } else {
    if (cfg.contains("ks")) {
      throw std::invalid_argument("\"ks\" requires a k-heavy base layout");
    }
    gammas = cfg.contains("gammas") ? get_number_list(cfg, "gammas")
                                    : std::vector<double>{base.gamma};
    if (o.has_corruption()) gammas = {o.corruption};
  }
  if (o.has_batch_size()) ns = {o.batch_size};
  if (o.has_batches()) ms = {o.batches};

  ExperimentConfig tmpl;
  tmpl.hrr_cfg = hrr_from_json(cfg);
  tmpl.med_cfg = median_from_json(cfg);
  tmpl.orlr_pool = get_int(cfg, "config", "orlr_pool", tmpl.orlr_pool);
  tmpl.repeats = o.has_repeats() ? o.repeats : get_int(cfg, "config", "repeats", 1);
  tmpl.seed = o.has_seed() ? o.seed : get_seed(cfg, "config", "seed", 0);
  tmpl.threads = resolve_thread_budget(cfg, o);

  // Build and validate every cell before running any, so a bad grid fails
  // fast instead of after minutes of fitting.
  std::vector<ExperimentConfig> cells;
  const std::size_t axis_count = base_kh != nullptr ? ks.size() : gammas.size();
  for (int n : ns) {
    for (int m : ms) {
      for (std::size_t a = 0; a < axis_count; ++a) {
        SynthSpec spec = base;
        spec.n = n;
        spec.m = m;
        if (base_kh != nullptr) {
          KHeavyLayout kh = *base_kh;
          kh.k = ks[a];
          spec.layout = kh;
          spec.gamma = k_heavy_gamma(kh, n, m);
        } else {
          spec.gamma = gammas[a];
        }
        if (o.has_seed()) spec.seed = o.seed;
        for (Algorithm algo : algos) {
          ExperimentConfig ec = tmpl;
          ec.source = SynthSource{spec};
          ec.algorithm = algo;
          validate_config(ec);
          cells.push_back(std::move(ec));
        }
      }
    }
  }

  std::vector<ResultRow> rows;
  for (const ExperimentConfig& ec : cells) {
    rows = run_and_write(ec, out_path, std::move(rows), nullptr);
  }
  write_results_csv(out_path, rows);
  std::cout << "wrote " << out_path << " (" << rows.size() << " rows, " << cells.size()
            << " cells)" << '\n';
}

void cmd_eval(const std::string& estimate_path, const std::string& data_path,
              const std::string& csv_path, const std::string& schema_path,
              const std::string& out_path) {
  auto [algo, beta] = load_estimate_json(estimate_path);
  std::vector<ResultRow> rows;
  if (!data_path.empty()) {
    const Dataset ds = load_dataset(data_path);
    if (!ds.truth.has_value()) {
      throw data_error(data_path + ": dataset carries no ground truth to evaluate against");
    }
    if (beta.dim() != ds.truth->beta_star.dim()) {
      throw data_error("estimate dimension " + std::to_string(beta.dim()) +
                       " does not match dataset p=" + std::to_string(ds.spec.p));
    }
    rows.push_back({"0", algo, ds.spec.p, ds.spec.n, ds.spec.m, ds.spec.gamma,
                    layout_name(ds.spec.layout), "l2_error",
                    l2_error(beta, ds.truth->beta_star)});
  } else {
    const CsvSchema schema = schema_from_json(schema_path);
    const CsvData data = load_csv(csv_path, schema);
    if (data.y.size() == 0) {
      throw data_error(csv_path + ": no usable rows");
    }
    if (beta.dim() != data.x.rows()) {
      throw data_error("estimate dimension " + std::to_string(beta.dim()) +
                       " does not match csv feature count " +
                       std::to_string(data.x.rows()));
    }
    const MiniBatch block(data.x, data.y, 0);
    rows.push_back({"0", algo, static_cast<int>(data.x.rows()),
                    static_cast<int>(data.y.size()), 1, 0.0, "csv", "mae",
                    mae(predict(block, beta), data.y)});
  }
  write_results_csv(out_path, rows);
  std::cout << "wrote " << out_path << " (" << rows.size() << " rows)" << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust least-squares regression over corrupted mini-batches"};
  app.require_subcommand(1);

  std::string gen_config, gen_out;
  Overrides gen_o;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset file");
  gen->add_option("--config", gen_config, "JSON generator config")->required();
  gen->add_option("--out", gen_out, "output dataset path")->required();
  add_override_flags(gen, gen_o, /*with_repeats=*/false);

  std::string fit_config, fit_algo, fit_data, fit_csv, fit_schema, fit_out, fit_save;
  Overrides fit_o;
  CLI::App* fit = app.add_subcommand("fit", "fit one algorithm on one dataset");
  fit->add_option("--config", fit_config, "JSON experiment config");
  fit->add_option("--algo", fit_algo, "drlr | orlr | ols-avg | hrr-avg");
  CLI::Option* fit_data_opt = fit->add_option("--data", fit_data, "dataset file from gen");
  CLI::Option* fit_csv_opt = fit->add_option("--csv", fit_csv, "delimited text data");
  CLI::Option* fit_schema_opt =
      fit->add_option("--schema", fit_schema, "JSON column schema for --csv");
  fit_data_opt->excludes(fit_csv_opt);
  fit_data_opt->excludes(fit_schema_opt);
  fit_csv_opt->needs(fit_schema_opt);
  fit->add_option("--out", fit_out, "output CSV path")->required();
  fit->add_option("--save-estimate", fit_save, "write the run-0 coefficients as JSON");
  add_override_flags(fit, fit_o, /*with_repeats=*/true);

  std::string sweep_config, sweep_out;
  Overrides sweep_o;
  CLI::App* sweep = app.add_subcommand("sweep", "run a grid of synthetic experiments");
  sweep->add_option("--config", sweep_config, "JSON sweep config")->required();
  sweep->add_option("--out", sweep_out, "output CSV path")->required();
  add_override_flags(sweep, sweep_o, /*with_repeats=*/true);

  std::string eval_estimate, eval_data, eval_csv, eval_schema, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "score a saved estimate against data");
  eval->add_option("--estimate", eval_estimate, "estimate JSON from fit --save-estimate")
      ->required();
  CLI::Option* eval_data_opt =
      eval->add_option("--data", eval_data, "dataset file with ground truth");
  CLI::Option* eval_csv_opt = eval->add_option("--csv", eval_csv, "delimited text data");
  CLI::Option* eval_schema_opt =
      eval->add_option("--schema", eval_schema, "JSON column schema for --csv");
  eval_data_opt->excludes(eval_csv_opt);
  eval_data_opt->excludes(eval_schema_opt);
  eval_csv_opt->needs(eval_schema_opt);
  eval->add_option("--out", eval_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      cmd_gen(gen_config, gen_out, gen_o);
    } else if (fit->parsed()) {
      if (fit_data.empty() && fit_csv.empty()) {
        throw std::invalid_argument("fit needs a data source: --data or --csv");
      }
      cmd_fit(fit_config, fit_algo, fit_data, fit_csv, fit_schema, fit_out, fit_save,
              fit_o);
    } else if (sweep->parsed()) {
      cmd_sweep(sweep_config, sweep_out, sweep_o);
    } else if (eval->parsed()) {
      if (eval_data.empty() && eval_csv.empty()) {
        throw std::invalid_argument("eval needs a data source: --data or --csv");
      }
      cmd_eval(eval_estimate, eval_data, eval_csv, eval_schema, eval_out);
    }
    return 0;
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
