#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "robustlsq/datagen.hpp"
#include "robustlsq/drlr.hpp"
#include "robustlsq/errors.hpp"

using namespace robustlsq;

namespace {

struct SynthData {
  GroundTruth truth;
  std::vector<MiniBatch> batches;
};

SynthData synth(const SynthSpec& spec) {
  GroundTruth truth = gen_ground_truth(spec);
  std::vector<MiniBatch> batches = gen_batches(spec, truth);
  return {std::move(truth), std::move(batches)};
}

MiniBatch zero_design_batch(int p, int n, std::int64_t id) {
  return MiniBatch(Eigen::MatrixXd::Zero(p, n), Eigen::VectorXd::Ones(n), id);
}

}  // namespace

TEST_CASE("a single batch consolidates to its own estimate") {
  SynthSpec spec;
  spec.p = 4;
  spec.n = 100;
  spec.m = 1;
  spec.gamma = 0.2;
  spec.seed = 1;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  DrlrReport report = drlr_fit(batches);
  HrrResult solo = hrr_fit(batches[0]);
  CHECK(report.consolidated.vec() == solo.beta.vec());
  CHECK(report.pool.size() == 1);
  CHECK(report.per_batch.size() == 1);
  CHECK(report.dominating.members == std::vector<int>{0});
}

TEST_CASE("results are identical across thread counts") {
  SynthSpec spec;
  spec.p = 6;
  spec.n = 150;
  spec.m = 9;
  spec.gamma = 0.3;
  spec.sigma = 0.1;
  spec.seed = 42;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  DrlrReport serial = drlr_fit(batches, HrrConfig{}, MedianConfig{}, 1);
  DrlrReport parallel = drlr_fit(batches, HrrConfig{}, MedianConfig{}, 4);
  CHECK(serial.consolidated.vec() == parallel.consolidated.vec());
  CHECK(serial.dominating == parallel.dominating);
  REQUIRE(serial.per_batch.size() == parallel.per_batch.size());
  for (std::size_t i = 0; i < serial.per_batch.size(); ++i) {
    CHECK(serial.per_batch[i].beta.vec() == parallel.per_batch[i].beta.vec());
    CHECK(serial.per_batch[i].uncorrupted == parallel.per_batch[i].uncorrupted);
  }
  CHECK(serial.fit_seconds >= 0.0);
  CHECK(serial.consolidate_seconds >= 0.0);
}

TEST_CASE("noiseless corrupted batches are recovered exactly") {
  SynthSpec spec;
  spec.p = 5;
  spec.n = 200;
  spec.m = 6;
  spec.gamma = 0.35;
  spec.sigma = 0.0;
  spec.seed = 7;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  DrlrReport report = drlr_fit(batches);
  CHECK((report.consolidated.vec() - data.truth.beta_star.vec()).norm() <= 1e-6);
}

TEST_CASE("heavily corrupted batches do not drag the consolidated estimate") {
  KHeavyLayout layout;
  layout.k = 2;
  layout.heavy_ratio = 0.9;
  layout.light_ratio = 0.1;
  SynthSpec spec;
  spec.p = 5;
  spec.n = 200;
  spec.m = 6;
  spec.sigma = 0.05;
  spec.layout = layout;
  spec.gamma = k_heavy_gamma(layout, spec.n, spec.m);
  spec.seed = 11;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;

  DrlrReport report = drlr_fit(batches);
  const double drlr_err = (report.consolidated.vec() - data.truth.beta_star.vec()).norm();

  Eigen::VectorXd avg = Eigen::VectorXd::Zero(spec.p);
  for (const auto& r : report.per_batch) avg += r.beta.vec();
  avg /= static_cast<double>(report.per_batch.size());
  const double avg_err = (avg - data.truth.beta_star.vec()).norm();

  CHECK(drlr_err < avg_err);
  CHECK(drlr_err <= 0.2);
}

TEST_CASE("consolidated error obeys the five-epsilon majority bound") {
  SynthSpec spec;
  spec.p = 8;
  spec.n = 250;
  spec.m = 11;
  spec.gamma = 0.3;
  spec.sigma = 0.1;
  spec.seed = 23;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  DrlrReport report = drlr_fit(batches);

  std::vector<double> errors;
  for (const auto& r : report.per_batch) {
    errors.push_back((r.beta.vec() - data.truth.beta_star.vec()).norm());
  }
  std::sort(errors.begin(), errors.end());
  // eps_emp = the floor(m/2)+1 smallest per-batch error, so a majority of
  // estimates sits within eps_emp of the truth by construction.
  const double eps_emp = errors[static_cast<std::size_t>(spec.m / 2)];
  const double err = (report.consolidated.vec() - data.truth.beta_star.vec()).norm();
  CHECK(err <= 5.0 * eps_emp + 1e-9);
}

TEST_CASE("a numerically failing batch is excluded when a majority survives") {
  SynthSpec spec;
  spec.p = 3;
  spec.n = 60;
  spec.m = 4;
  spec.gamma = 0.2;
  spec.seed = 31;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  batches.push_back(zero_design_batch(3, 60, 4));

  DrlrReport report = drlr_fit(batches);
  CHECK(report.failed_batch_ids == std::vector<std::int64_t>{4});
  CHECK(report.pool.size() == 4);
  CHECK(report.per_batch.size() == 4);
}

TEST_CASE("too many failing batches abort with the failing id") {
  std::vector<MiniBatch> batches;
  batches.push_back(zero_design_batch(3, 60, 0));
  batches.push_back(zero_design_batch(3, 60, 1));
  SynthSpec spec;
  spec.p = 3;
  spec.n = 60;
  spec.m = 1;
  spec.seed = 5;
  SynthData data = synth(spec);
  MiniBatch renumbered(data.batches[0].x(), data.batches[0].y(), 2);
  batches.push_back(renumbered);
  bool threw = false;
  try {
    drlr_fit(batches);
  } catch (const numerical_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("batch 0") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("input validation catches shape and id violations") {
  CHECK_THROWS_AS(drlr_fit({}), std::invalid_argument);

  SynthSpec spec;
  spec.p = 3;
  spec.n = 50;
  spec.m = 2;
  spec.seed = 9;
  SynthData data = synth(spec);
  std::vector<MiniBatch>& batches = data.batches;
  std::vector<MiniBatch> dup = {batches[0], MiniBatch(batches[1].x(), batches[1].y(), 0)};
  CHECK_THROWS_AS(drlr_fit(dup), std::invalid_argument);

  std::vector<MiniBatch> mixed = {
      batches[0], MiniBatch(Eigen::MatrixXd::Identity(4, 4), Eigen::VectorXd::Ones(4), 1)};
  CHECK_THROWS_AS(drlr_fit(mixed), std::invalid_argument);
}
