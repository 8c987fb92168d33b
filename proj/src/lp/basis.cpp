#include "basis.hpp"

#include <cmath>

namespace robustprice::lp::detail {

namespace {
constexpr double kEtaDrop = 1e-14;
}

BasisFactor::BasisFactor(const ColumnMatrix& a) : a_(a), m_(a.rows) {}

bool BasisFactor::refactor(const std::vector<int>& heads) {
  const int n = a_.cols;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(heads.size() * 4);
  for (int col = 0; col < m_; ++col) {
    const int var = heads[col];
    if (var < n) {
      for (int k = a_.start[var]; k < a_.start[var + 1]; ++k) {
        triplets.emplace_back(a_.index[k], col, a_.value[k]);
      }
    } else {
      triplets.emplace_back(var - n, col, -1.0);
    }
  }
  basis_.resize(m_, m_);
  basis_.setFromTriplets(triplets.begin(), triplets.end());
  basis_.makeCompressed();

  lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(basis_);
  lu_->factorize(basis_);
  etas_.clear();
  return lu_->info() == Eigen::Success;
}

void BasisFactor::ftran(Eigen::VectorXd& x) const {
  x = lu_->solve(x);
  for (const Eta& eta : etas_) {
    const double xr = x[eta.row] / eta.pivot;
    x[eta.row] = xr;
    if (xr == 0.0) continue;
    for (std::size_t k = 0; k < eta.index.size(); ++k) {
      x[eta.index[k]] -= eta.value[k] * xr;
    }
  }
}

void BasisFactor::btran(Eigen::VectorXd& y) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = y[it->row];
    for (std::size_t k = 0; k < it->index.size(); ++k) {
      acc -= it->value[k] * y[it->index[k]];
    }
    y[it->row] = acc / it->pivot;
  }
  y = lu_->transpose().solve(y);
}

void BasisFactor::update(int row, const Eigen::VectorXd& alpha) {
  Eta eta;
  eta.row = row;
  eta.pivot = alpha[row];
  for (int i = 0; i < m_; ++i) {
    if (i != row && std::abs(alpha[i]) > kEtaDrop) {
      eta.index.push_back(i);
      eta.value.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(eta));
}

}  // namespace robustprice::lp::detail
