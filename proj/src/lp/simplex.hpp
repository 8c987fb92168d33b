#pragma once

#include <vector>

#include "robustprice/lp.hpp"

namespace robustprice::lp::detail {

/// Compressed sparse column storage.
struct ColumnMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> value;

  int nnz(int col) const { return start[col + 1] - start[col]; }
};

/// min cost.x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
struct ComputationalForm {
  ColumnMatrix a;
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
};

struct CoreResult {
  Status status = Status::infeasible;
  double objective = 0.0;
  std::vector<double> x;
  /// Multipliers y with cost - A^T y = reduced costs (minimization sense).
  std::vector<double> row_duals;
  int iterations = 0;
  /// Final basis: basic variable of each row, and the state of every column
  /// (structural first, then logical).
  std::vector<int> heads;
  std::vector<unsigned char> state;
};

/// A basis to start from; ignored unless it matches the form's dimensions.
struct StartBasis {
  const std::vector<int>* heads = nullptr;
  const std::vector<unsigned char>* state = nullptr;
};

/// Bounded primal simplex with a composite phase 1, Devex pricing and a
/// two-pass Harris ratio test. Deterministic for a fixed input.
CoreResult run_simplex(const ComputationalForm& form, const SolverOptions& options, StartBasis start = {});

}  // namespace robustprice::lp::detail
