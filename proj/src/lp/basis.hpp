#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "simplex.hpp"

namespace robustprice::lp::detail {

/// Factorized simplex basis. Column j < n of the working matrix is structural
/// column j of A; column n + i is the logical -e_i. Holds a sparse LU of the
/// last refactorized basis plus a product-form eta file for later pivots.
class BasisFactor {
 public:
  explicit BasisFactor(const ColumnMatrix& a);

  /// Factorizes the basis given by `heads`; false if numerically singular.
  bool refactor(const std::vector<int>& heads);

  /// x <- B^{-1} x
  void ftran(Eigen::VectorXd& x) const;
  /// y <- B^{-T} y
  void btran(Eigen::VectorXd& y) const;

  /// Records the pivot replacing the column in `row` by the entering column
  /// whose transformed image is `alpha` = B^{-1} a_q.
  void update(int row, const Eigen::VectorXd& alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int row;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  const ColumnMatrix& a_;
  int m_;
  Eigen::SparseMatrix<double> basis_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
  std::vector<Eta> etas_;
};

}  // namespace robustprice::lp::detail
