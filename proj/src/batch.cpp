#include "robustlsq/batch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robustlsq {

namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

Coefficients::Coefficients(Eigen::VectorXd beta) : beta_(std::move(beta)) {
  if (beta_.size() == 0) {
    throw std::invalid_argument("coefficient vector must be non-empty");
  }
  require_finite(beta_, "coefficient vector");
}

IndexSet::IndexSet(std::vector<int> indices, int universe)
    : indices_(std::move(indices)), universe_(universe) {
  if (universe_ < 0) {
    throw std::invalid_argument("index set universe must be non-negative");
  }
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("index set contains a duplicate position");
  }
  for (int i : indices_) {
    if (i < 0 || i >= universe_) {
      throw std::invalid_argument("index set position " + std::to_string(i) +
                                  " is outside universe of size " + std::to_string(universe_));
    }
  }
}

IndexSet IndexSet::full(int n) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return IndexSet(std::move(all), n);
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

MiniBatch::MiniBatch(Eigen::MatrixXd x, Eigen::VectorXd y, std::int64_t id)
    : x_(std::move(x)), y_(std::move(y)), id_(id) {
  if (x_.rows() == 0) {
    throw std::invalid_argument("mini-batch must have at least one feature dimension");
  }
  if (x_.cols() != y_.size()) {
    throw std::invalid_argument("mini-batch has " + std::to_string(x_.cols()) +
                                " covariate columns but " + std::to_string(y_.size()) +
                                " responses");
  }
  require_finite(x_, "covariate matrix");
  if (y_.size() > 0) {
    require_finite(y_, "response vector");
  }
}

ResidualVector::ResidualVector(Eigen::VectorXd magnitudes) : r_(std::move(magnitudes)) {
  for (Eigen::Index i = 0; i < r_.size(); ++i) {
    if (!std::isfinite(r_[i]) || r_[i] < 0.0) {
      throw std::invalid_argument("residual magnitudes must be finite and non-negative");
    }
  }
  order_.resize(static_cast<std::size_t>(r_.size()));
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [this](int a, int b) { return r_[a] < r_[b]; });
}

Eigen::VectorXd predict(const MiniBatch& batch, const Coefficients& beta) {
  if (batch.p() != beta.dim()) {
    throw std::invalid_argument("coefficient dimension " + std::to_string(beta.dim()) +
                                " does not match batch feature dimension " +
                                std::to_string(batch.p()));
  }
  // Scalar accumulation in fixed feature order so predictions are exactly
  // reproducible, independent of any library kernel's summation order.
  Eigen::VectorXd out(batch.n());
  for (Eigen::Index j = 0; j < batch.n(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < batch.p(); ++i) {
      acc += batch.x()(i, j) * beta.vec()[i];
    }
    out[j] = acc;
  }
  return out;
}

ResidualVector residual_magnitudes(const MiniBatch& batch, const Coefficients& beta) {
  Eigen::VectorXd r = (batch.y() - predict(batch, beta)).cwiseAbs();
  return ResidualVector(std::move(r));
}

MiniBatch restrict(const MiniBatch& batch, const IndexSet& z) {
  if (z.universe() != batch.n()) {
    throw std::invalid_argument("index set universe " + std::to_string(z.universe()) +
                                " does not match batch size " + std::to_string(batch.n()));
  }
  const auto& idx = z.indices();
  Eigen::MatrixXd x(batch.p(), static_cast<Eigen::Index>(idx.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = batch.x().col(idx[k]);
    y[static_cast<Eigen::Index>(k)] = batch.y()[idx[k]];
  }
  return MiniBatch(std::move(x), std::move(y), batch.id());
}

}  // namespace robustlsq
