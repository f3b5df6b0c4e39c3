#ifndef ROBUSTLSQ_BATCH_HPP_
#define ROBUSTLSQ_BATCH_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace robustlsq {

/// A p-dimensional regression coefficient vector. Entries are validated
/// finite at construction; no silent broadcasting happens anywhere.
class Coefficients {
 public:
  explicit Coefficients(Eigen::VectorXd beta);

  const Eigen::VectorXd& vec() const { return beta_; }
  Eigen::Index dim() const { return beta_.size(); }

 private:
  Eigen::VectorXd beta_;
};

/// Sorted duplicate-free set of sample positions within one batch of size
/// `universe`.
class IndexSet {
 public:
  IndexSet(std::vector<int> indices, int universe);
  static IndexSet full(int n);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  int universe() const { return universe_; }
  bool contains(int i) const;
  bool operator==(const IndexSet& other) const {
    return universe_ == other.universe_ && indices_ == other.indices_;
  }

 private:
  std::vector<int> indices_;
  int universe_;
};

/// One block of samples: covariates stored column-per-sample (p x n) next to
/// the possibly corrupted response vector. Immutable after construction.
///
/// n = 0 is permitted only as an intermediate produced by restricting to an
/// empty index set; every solver entry point rejects it.
class MiniBatch {
 public:
  MiniBatch(Eigen::MatrixXd x, Eigen::VectorXd y, std::int64_t id);

  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  std::int64_t id() const { return id_; }
  Eigen::Index p() const { return x_.rows(); }
  Eigen::Index n() const { return x_.cols(); }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::int64_t id_;
};

/// Per-sample absolute residual magnitudes plus their ascending order.
/// order()[k] is the sample index holding the (k+1)-th smallest magnitude;
/// ties resolve to the lower sample index so thresholding is deterministic.
class ResidualVector {
 public:
  explicit ResidualVector(Eigen::VectorXd magnitudes);

  const Eigen::VectorXd& r() const { return r_; }
  const std::vector<int>& order() const { return order_; }
  /// k-th smallest magnitude, zero-based.
  double sorted(int k) const { return r_[order_[static_cast<std::size_t>(k)]]; }
  Eigen::Index n() const { return r_.size(); }

 private:
  Eigen::VectorXd r_;
  std::vector<int> order_;
};

/// What the generator knows and an estimator is judged against: the true
/// coefficients, the per-batch uncorrupted sets, and the corruption vectors.
/// Invariant: sample j of batch i is in uncorrupted_sets[i] exactly when
/// corruption_vectors[i][j] == 0.
struct GroundTruth {
  Coefficients beta_star;
  std::vector<IndexSet> uncorrupted_sets;
  std::vector<Eigen::VectorXd> corruption_vectors;
};

/// X^T beta for every sample of the batch.
Eigen::VectorXd predict(const MiniBatch& batch, const Coefficients& beta);

/// |y - X^T beta| with the ascending order attached.
ResidualVector residual_magnitudes(const MiniBatch& batch, const Coefficients& beta);

/// Sub-batch with columns/entries selected by z, relative order preserved.
MiniBatch restrict(const MiniBatch& batch, const IndexSet& z);

}  // namespace robustlsq

#endif  // ROBUSTLSQ_BATCH_HPP_
