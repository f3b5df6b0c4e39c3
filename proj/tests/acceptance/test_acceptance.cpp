// Acceptance gate: one test case per shipping criterion, each printing a
// single PASS/FAIL line with its measured numbers. Tolerances and budgets
// are pinned here, next to the check that uses them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "robustlsq/batch.hpp"
#include "robustlsq/bench.hpp"
#include "robustlsq/consolidation.hpp"
#include "robustlsq/datagen.hpp"
#include "robustlsq/drlr.hpp"
#include "robustlsq/hrr.hpp"
#include "robustlsq/metrics.hpp"
#include "robustlsq/orlr.hpp"
#include "robustlsq/rng.hpp"

using namespace robustlsq;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("ACCEPTANCE %2d %-42s %s  [%s]\n", id, name, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(pass, "acceptance criterion ", id, " (", name, "): ", detail);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

struct Gen {
  GroundTruth truth;
  std::vector<MiniBatch> batches;
};

Gen make_data(const SynthSpec& spec, int threads = 0) {
  validate_spec(spec);
  GroundTruth truth = gen_ground_truth(spec);
  std::vector<MiniBatch> batches = gen_batches(spec, truth, threads);
  return {std::move(truth), std::move(batches)};
}

/// The streaming protocol: bootstrap on the first window of batches, then
/// admit the rest one at a time. Returns the final consolidated estimate.
Coefficients orlr_stream(const std::vector<MiniBatch>& batches, int capacity,
                         int threads = 0) {
  const int warm = std::min<int>(capacity, static_cast<int>(batches.size()));
  const std::vector<MiniBatch> head(batches.begin(), batches.begin() + warm);
  OrlrUpdateResult r = orlr_init(head, capacity, HrrConfig{}, MedianConfig{}, threads);
  for (std::size_t i = static_cast<std::size_t>(warm); i < batches.size(); ++i) {
    r = orlr_update(r.state, batches[i]);
  }
  return r.consolidated;
}

Eigen::VectorXd unit_dir(Rng& rng, int p) {
  Eigen::VectorXd v(p);
  double norm = 0.0;
  do {
    for (int i = 0; i < p; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

/// A pool with a majority of estimates inside an eps-ball of beta_star and
/// an adversarial remainder offset by up to 1e6, in shuffled age order.
struct PoolSetup {
  EstimatePool pool;
  Eigen::VectorXd beta_star;
  double eps = 0.0;
  int m = 0;
  int mt = 0;
  int good_count = 0;
};

PoolSetup make_majority_pool(Rng& rng, int min_m) {
  const int p = 1 + static_cast<int>(rng.below(10));
  const int m = min_m + static_cast<int>(rng.below(static_cast<std::uint64_t>(22 - min_m)));
  const int mt = m / 2 + 1;
  const int good_count = mt + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - mt + 1)));
  const double eps = std::pow(10.0, rng.uniform(-3.0, 0.0));

  Eigen::VectorXd beta_star(p);
  for (int i = 0; i < p; ++i) beta_star[i] = 5.0 * rng.normal();

  std::vector<int> kind(static_cast<std::size_t>(m), 0);
  for (int i = good_count; i < m; ++i) kind[static_cast<std::size_t>(i)] = 1;
  for (int i = m - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(kind[static_cast<std::size_t>(i)], kind[static_cast<std::size_t>(j)]);
  }

  PoolSetup setup{EstimatePool(m), beta_star, eps, m, mt, good_count};
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd est;
    if (kind[static_cast<std::size_t>(i)] == 0) {
      est = beta_star + unit_dir(rng, p) * (eps * rng.uniform01());
    } else {
      const double lo = std::log10(std::max(4.0 * eps, 1e-2));
      const double offset = std::pow(10.0, rng.uniform(lo, 6.0));
      est = beta_star + unit_dir(rng, p) * offset;
    }
    setup.pool.append(i, Coefficients(std::move(est)));
  }
  return setup;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("acceptance 1: threshold size estimates match brute force") {
  const auto t0 = Clock::now();
  Rng rng(101);
  const int trials = 1000;
  int mismatches = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = 4 + static_cast<int>(rng.below(47));  // [4, 50]
    Eigen::VectorXd mags(n);
    for (int i = 0; i < n; ++i) {
      const double scale = rng.uniform01() < 0.3 ? 100.0 : 1.0;
      mags[i] = std::abs(rng.normal()) * scale;
    }
    // duplicated magnitudes exercise the deterministic tie-breaking
    for (int i = 1; i < n; ++i) {
      if (rng.uniform01() < 0.2) {
        mags[i] = mags[static_cast<int>(rng.below(static_cast<std::uint64_t>(i)))];
      }
    }
    const ResidualVector r{mags};
    if (tau_o(r) != oracles::tau_o(r)) ++mismatches;
    if (heuristic_size(r) != oracles::heuristic_size(r)) ++mismatches;
  }
  const double dt = secs(t0);
  const bool pass = mismatches == 0 && dt < 5.0;
  report(1, "threshold size estimates match brute force", pass,
         std::to_string(mismatches) + " mismatches in " + std::to_string(trials) +
             " trials, " + fmt(dt) + "s (budget 5s)");
}

TEST_CASE("acceptance 2: noiseless corruption sweep recovers exactly") {
  const auto t0 = Clock::now();
  const double tol = 1e-6;
  const int seeds = 10;
  double worst = 0.0;
  for (double gamma : {0.1, 0.2, 0.3, 0.4}) {
    for (int s = 0; s < seeds; ++s) {
      SynthSpec spec;
      spec.p = 20;
      spec.n = 1000;
      spec.m = 10;
      spec.gamma = gamma;
      spec.sigma = 0.0;
      spec.seed = 20000 + static_cast<std::uint64_t>(gamma * 100) * 100 +
                  static_cast<std::uint64_t>(s);
      const Gen data = make_data(spec);
      const double drlr_err =
          estimate_distance(drlr_fit(data.batches).consolidated, data.truth.beta_star);
      const double orlr_err =
          estimate_distance(orlr_stream(data.batches, 7), data.truth.beta_star);
      worst = std::max({worst, drlr_err, orlr_err});
    }
  }
  const double dt = secs(t0);
  const bool pass = worst <= tol && dt < 30.0;
  report(2, "noiseless corruption sweep recovers exactly", pass,
         "worst l2 error " + fmt(worst) + " vs tol 1e-6, " + fmt(dt) + "s (budget 30s)");
}

TEST_CASE("acceptance 3: consolidation shrugs off overwhelmed batches") {
  const auto t0 = Clock::now();
  const int seeds = 10;
  double drlr_at_0 = 0.0, drlr_at_8 = 0.0, hrr_avg_at_8 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    for (int k : {0, 8}) {
      SynthSpec spec;
      spec.p = 20;
      spec.n = 1000;
      spec.m = 20;
      spec.sigma = 0.1;
      KHeavyLayout layout{k, 0.9, 0.1};
      spec.layout = layout;
      spec.gamma = k_heavy_gamma(layout, spec.n, spec.m);
      spec.seed = 30000 + static_cast<std::uint64_t>(100 * k + s);
      const Gen data = make_data(spec);
      const double drlr_err =
          estimate_distance(drlr_fit(data.batches).consolidated, data.truth.beta_star);
      if (k == 0) {
        drlr_at_0 += drlr_err / seeds;
      } else {
        drlr_at_8 += drlr_err / seeds;
        hrr_avg_at_8 +=
            estimate_distance(baseline_hrr_avg(data.batches), data.truth.beta_star) / seeds;
      }
    }
  }
  const double dt = secs(t0);
  const bool stable = drlr_at_8 <= 1.5 * drlr_at_0;
  const bool contrast = hrr_avg_at_8 >= 3.0 * drlr_at_8;
  const bool pass = stable && contrast && dt < 60.0;
  report(3, "consolidation shrugs off overwhelmed batches", pass,
         "drlr " + fmt(drlr_at_0) + " -> " + fmt(drlr_at_8) + " (limit 1.5x), hrr-avg " +
             fmt(hrr_avg_at_8) + " (need >= 3x drlr), " + fmt(dt) + "s (budget 60s)");
}

TEST_CASE("acceptance 4: consolidation stays within five epsilon") {
  const auto t0 = Clock::now();
  Rng rng(404);
  const int trials = 500;
  const double solver_tol = 1e-6;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < trials; ++t) {
    const PoolSetup setup = make_majority_pool(rng, 1);
    const auto [estimate, dominating] = consolidate(setup.pool);
    const double err = (estimate.vec() - setup.beta_star).norm();
    const double bound = 5.0 * setup.eps + solver_tol;
    if (err > bound) ++violations;
    worst_ratio = std::max(worst_ratio, err / (5.0 * setup.eps));
  }
  const double dt = secs(t0);
  const bool pass = violations == 0 && dt < 10.0;
  report(4, "consolidation stays within five epsilon", pass,
         std::to_string(violations) + " violations in " + std::to_string(trials) +
             " pools, worst err/5eps " + fmt(worst_ratio) + ", " + fmt(dt) +
             "s (budget 10s)");
}

TEST_CASE("acceptance 5: online update keeps the corrected bound") {
  const auto t0 = Clock::now();
  Rng rng(505);
  const int trials = 500;
  const double solver_tol = 1e-6;
  int violations = 0;
  // insertion cases: the new estimate can enter the recomputed dominating
  // set while inaccurate, enter it while accurate, or stay outside it
  int in_dom_inaccurate = 0, in_dom_accurate = 0, outside = 0;
  for (int t = 0; t < trials; ++t) {
    const PoolSetup setup = make_majority_pool(rng, 3);
    const auto [estimate, dominating] = consolidate(setup.pool);
    OrlrState state{setup.pool, dominating, setup.m, HrrConfig{}, MedianConfig{}};

    const int p = static_cast<int>(setup.beta_star.size());
    Eigen::VectorXd incoming;
    if (t % 3 == 0) {
      incoming = setup.beta_star + unit_dir(rng, p) * (setup.eps * rng.uniform01());
    } else if (t % 3 == 1) {
      incoming = setup.beta_star + unit_dir(rng, p) * (setup.eps * rng.uniform(1.0, 2.0));
    } else {
      incoming = setup.beta_star + unit_dir(rng, p) * std::pow(10.0, rng.uniform(2.0, 6.0));
    }
    const bool accurate = (incoming - setup.beta_star).norm() <= setup.eps;

    const OrlrUpdateResult updated = admit_estimate(state, Coefficients(incoming));
    const double err = (updated.consolidated.vec() - setup.beta_star).norm();
    const double bound = 5.0 * setup.eps + 4.0 * setup.eps / setup.mt + solver_tol;
    if (err > bound) ++violations;

    const int new_pos = updated.state.pool.size() - 1;
    const bool in_dom = updated.state.dominating.contains(new_pos);
    if (in_dom && !accurate) ++in_dom_inaccurate;
    if (in_dom && accurate) ++in_dom_accurate;
    if (!in_dom && !accurate) ++outside;
  }
  const double dt = secs(t0);
  const bool covered = in_dom_inaccurate > 0 && in_dom_accurate > 0 && outside > 0;
  const bool pass = violations == 0 && covered && dt < 10.0;
  report(5, "online update keeps the corrected bound", pass,
         std::to_string(violations) + " violations; insertion cases " +
             std::to_string(in_dom_inaccurate) + "/" + std::to_string(in_dom_accurate) +
             "/" + std::to_string(outside) + ", " + fmt(dt) + "s (budget 10s)");
}

TEST_CASE("acceptance 6: pivot distance quantile stays within two epsilon") {
  const auto t0 = Clock::now();
  Rng rng(606);
  const int trials = 500;
  int violations = 0;
  double worst_ratio = 0.0;
  for (int t = 0; t < trials; ++t) {
    const PoolSetup setup = make_majority_pool(rng, 1);
    const int pivot = pivot_batch(setup.pool);
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(setup.m));
    for (int j = 0; j < setup.m; ++j) {
      dists.push_back(
          estimate_distance(setup.pool.estimate(pivot), setup.pool.estimate(j)));
    }
    std::sort(dists.begin(), dists.end());
    const double sigma_mt = dists[static_cast<std::size_t>(setup.mt - 1)];
    if (sigma_mt > 2.0 * setup.eps + 1e-9) ++violations;
    worst_ratio = std::max(worst_ratio, sigma_mt / (2.0 * setup.eps));
  }
  const double dt = secs(t0);
  const bool pass = violations == 0;
  report(6, "pivot distance quantile stays within two epsilon", pass,
         std::to_string(violations) + " violations in " + std::to_string(trials) +
             " pools, worst sigma/2eps " + fmt(worst_ratio) + ", " + fmt(dt) + "s");
}

TEST_CASE("acceptance 7: geometric median beats the grid oracle") {
  const auto t0 = Clock::now();
  Rng rng(707);
  const int trials = 200;
  int violations = 0;
  double worst_gap = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const int count = 1 + static_cast<int>(rng.below(9));
    std::vector<Coefficients> points;
    std::vector<Eigen::VectorXd> raw;
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd v(dim);
      for (int d = 0; d < dim; ++d) v[d] = rng.uniform(-5.0, 5.0);
      raw.push_back(v);
      points.emplace_back(v);
    }
    const Coefficients median = geometric_median(points);
    const double ours = oracles::sum_of_distances(median.vec(), raw);
    const double oracle =
        oracles::sum_of_distances(oracles::geometric_median(raw), raw);
    const double slack = 1e-6 * std::max(1.0, oracle);
    if (ours > oracle + slack) ++violations;
    worst_gap = std::max(worst_gap, (ours - oracle) / std::max(1.0, oracle));
  }
  const double dt = secs(t0);
  const bool pass = violations == 0;
  report(7, "geometric median beats the grid oracle", pass,
         std::to_string(violations) + " violations in " + std::to_string(trials) +
             " point sets, worst relative gap " + fmt(worst_gap) + ", " + fmt(dt) + "s");
}

TEST_CASE("acceptance 8: robust fits win under dense noise") {
  const auto t0 = Clock::now();
  const int seeds = 10;
  const std::vector<double> gammas{0.1, 0.2, 0.3, 0.4};
  std::vector<double> drlr_mean(gammas.size(), 0.0), orlr_mean(gammas.size(), 0.0),
      ols_mean(gammas.size(), 0.0), hrr_mean(gammas.size(), 0.0);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    for (int s = 0; s < seeds; ++s) {
      SynthSpec spec;
      spec.p = 20;
      spec.n = 1000;
      spec.m = 10;
      spec.gamma = gammas[g];
      spec.sigma = 0.1;
      spec.seed = 80000 + static_cast<std::uint64_t>(1000 * g + s);
      const Gen data = make_data(spec);
      const auto err = [&](const Coefficients& est) {
        return estimate_distance(est, data.truth.beta_star) / seeds;
      };
      drlr_mean[g] += err(drlr_fit(data.batches).consolidated);
      orlr_mean[g] += err(orlr_stream(data.batches, 7));
      ols_mean[g] += err(baseline_ols_avg(data.batches));
      hrr_mean[g] += err(baseline_hrr_avg(data.batches));
    }
  }
  const std::size_t top = gammas.size() - 1;
  const bool robust_win = drlr_mean[top] < ols_mean[top] && drlr_mean[top] < hrr_mean[top] &&
                          orlr_mean[top] < ols_mean[top] && orlr_mean[top] < hrr_mean[top];
  bool online_tracks = true;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    online_tracks = online_tracks && orlr_mean[g] <= 2.0 * drlr_mean[g];
  }
  const double dt = secs(t0);
  const bool pass = robust_win && online_tracks;
  report(8, "robust fits win under dense noise", pass,
         "at gamma 0.4: drlr " + fmt(drlr_mean[top]) + ", orlr " + fmt(orlr_mean[top]) +
             ", ols-avg " + fmt(ols_mean[top]) + ", hrr-avg " + fmt(hrr_mean[top]) + ", " +
             fmt(dt) + "s");
}

TEST_CASE("acceptance 9: fit time scales linearly in batch count") {
  const auto t0 = Clock::now();
  const std::vector<int> ms{10, 20, 40};
  std::vector<double> medians;
  for (int m : ms) {
    std::vector<double> times;
    for (int rep = 0; rep < 10; ++rep) {  // rep 0 is a warmup
      SynthSpec spec;
      spec.p = 20;
      spec.n = 2000;
      spec.m = m;
      spec.gamma = 0.2;
      spec.sigma = 0.1;
      spec.seed = 90000 + static_cast<std::uint64_t>(31 * m + rep);
      const Gen data = make_data(spec);
      const auto f0 = Clock::now();
      drlr_fit(data.batches, HrrConfig{}, MedianConfig{}, /*threads=*/1);
      const double dt = secs(f0);
      if (rep > 0) times.push_back(dt);
    }
    medians.push_back(median_of(times));
  }
  const double r1 = medians[1] / medians[0];
  const double r2 = medians[2] / medians[1];
  const double dt = secs(t0);
  const bool pass = r1 >= 1.5 && r1 <= 3.0 && r2 >= 1.5 && r2 <= 3.0;
  report(9, "fit time scales linearly in batch count", pass,
         "medians " + fmt(medians[0]) + "/" + fmt(medians[1]) + "/" + fmt(medians[2]) +
             "s, ratios " + fmt(r1) + ", " + fmt(r2) + " (need [1.5, 3.0]), " + fmt(dt) +
             "s");
}

namespace {

/// Scratch directory for the file-based criteria.
struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    static int counter = 0;
    dir = std::filesystem::temp_directory_path() /
          ("robustlsq_accept_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

double mean_metric(const std::vector<ResultRow>& rows, const std::string& metric) {
  for (const ResultRow& row : rows) {
    if (row.run == "mean" && row.metric == metric) return row.value;
  }
  FAIL("no mean row for metric ", metric);
  return 0.0;
}

}  // namespace

TEST_CASE("acceptance 10: corrupted csv pipeline keeps robust mae ahead") {
  const auto t0 = Clock::now();
  TempDir tmp;
  const std::string csv_path = tmp.path("rows.csv");
  {
    Rng rng(1010);
    const Eigen::VectorXd w =
        (Eigen::VectorXd(6) << 2.0, -1.5, 3.0, 0.5, -2.5, 1.0).finished();
    std::ofstream out(csv_path, std::ios::binary);
    out.precision(17);
    out << "x1,x2,x3,x4,x5,x6,y\n";
    for (int i = 0; i < 24000; ++i) {
      Eigen::VectorXd x(6);
      for (int d = 0; d < 6; ++d) x[d] = rng.normal();
      const double y = w.dot(x) + 0.05 * rng.normal();
      for (int d = 0; d < 6; ++d) out << x[d] << ',';
      out << y << '\n';
    }
    REQUIRE(out.good());
  }

  CsvSource src;
  src.path = csv_path;
  src.schema = CsvSchema{"y", {"x1", "x2", "x3", "x4", "x5", "x6"}, ','};
  src.batch_size = 500;
  src.test_fraction = 0.2;
  src.corruption_ratio = 0.35;  // within the 30-40% band

  const auto run_algo = [&](Algorithm algo) {
    ExperimentConfig cfg;
    cfg.source = src;
    cfg.algorithm = algo;
    cfg.repeats = 3;
    cfg.seed = 42;
    validate_config(cfg);
    return mean_metric(run_experiment(cfg), "mae");
  };
  const double drlr_mae = run_algo(Algorithm::drlr);
  const double orlr_mae = run_algo(Algorithm::orlr);
  const double ols_mae = run_algo(Algorithm::ols_avg);

  const double dt = secs(t0);
  const bool pass = drlr_mae <= ols_mae && orlr_mae <= ols_mae &&
                    orlr_mae <= 1.25 * drlr_mae;
  report(10, "corrupted csv pipeline keeps robust mae ahead", pass,
         "mae drlr " + fmt(drlr_mae) + ", orlr " + fmt(orlr_mae) + ", ols-avg " +
             fmt(ols_mae) + " (orlr/drlr " + fmt(orlr_mae / drlr_mae) + ", limit 1.25), " +
             fmt(dt) + "s");
}

TEST_CASE("acceptance 11: sweep output is byte deterministic") {
#ifndef ROBUST_LSQ_CLI_PATH
  report(11, "sweep output is byte deterministic", false,
         "robust-lsq binary not built into this configuration");
#else
  const auto t0 = Clock::now();
  TempDir tmp;
  {
    std::ofstream cfg(tmp.path("sweep.json"), std::ios::binary);
    cfg << R"({"base": {"p": 5, "n": 200, "m": 6, "sigma": 0.1, "seed": 7},
               "algos": ["drlr", "orlr", "ols-avg", "hrr-avg"],
               "gammas": [0.1, 0.3], "repeats": 2, "seed": 123})";
  }
  const auto run_sweep = [&](const std::string& out_name) {
    const std::string cmd = std::string(ROBUST_LSQ_CLI_PATH) + " sweep --config " +
                            tmp.path("sweep.json") + " --out " + tmp.path(out_name) +
                            " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const int rc1 = run_sweep("a.csv");
  const int rc2 = run_sweep("b.csv");

  const auto strip_timing = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string kept, line;
    while (std::getline(in, line)) {
      if (line.find("fit_seconds") == std::string::npos) kept += line + "\n";
    }
    return kept;
  };
  const std::string a = strip_timing(tmp.path("a.csv"));
  const std::string b = strip_timing(tmp.path("b.csv"));

  const double dt = secs(t0);
  const bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  report(11, "sweep output is byte deterministic", pass,
         std::to_string(a.size()) + " bytes compared after dropping timing rows, " +
             fmt(dt) + "s");
#endif
}
