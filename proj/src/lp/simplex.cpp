#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "basis.hpp"
#include "robustprice/error.hpp"

namespace robustprice::lp::detail {

namespace {

enum class VarState : unsigned char { basic, at_lower, at_upper, free_zero };

constexpr double kPivotTol = 1e-7;
constexpr double kDevexReset = 1e8;
// Consecutive zero-length pivots before the bounds are perturbed.
constexpr int kStallLimit = 10000;
constexpr double kPerturbation = 1e-6;

class PrimalSimplex {
 public:
  PrimalSimplex(const ComputationalForm& form, const SolverOptions& options, StartBasis start)
      : form_(form),
        start_(start),
        options_(options),
        n_(form.a.cols),
        m_(form.a.rows),
        factor_(form.a),
        primal_tol_(std::min(1e-9, options.feasibility_tol)),
        dual_tol_(std::min(1e-9, options.optimality_tol)) {}

  CoreResult run();

 private:
  int total() const { return n_ + m_; }
  double lower(int j) const { return lower_[j]; }
  double upper(int j) const { return upper_[j]; }
  double true_lower(int j) const { return j < n_ ? form_.col_lower[j] : form_.row_lower[j - n_]; }
  double true_upper(int j) const { return j < n_ ? form_.col_upper[j] : form_.row_upper[j - n_]; }
  double cost(int j) const { return j < n_ ? form_.cost[j] : 0.0; }

  /// a_j . v for the working column j.
  double dot_column(int j, const Eigen::VectorXd& v) const {
    if (j >= n_) return -v[j - n_];
    double acc = 0.0;
    for (int k = form_.a.start[j]; k < form_.a.start[j + 1]; ++k) {
      acc += form_.a.value[k] * v[form_.a.index[k]];
    }
    return acc;
  }

  void load_column(int j, Eigen::VectorXd& out) const {
    out.setZero(m_);
    if (j >= n_) {
      out[j - n_] = -1.0;
      return;
    }
    for (int k = form_.a.start[j]; k < form_.a.start[j + 1]; ++k) {
      out[form_.a.index[k]] = form_.a.value[k];
    }
  }

  void initialize();
  bool load_start();
  /// Widens every finite bound of a non-fixed variable by a small random
  /// amount so degenerate vertices split apart.
  void perturb();
  /// Restores the exact bounds; nonbasic variables move back onto them.
  void unperturb();
  void place_nonbasic();
  void refactor();
  CoreResult finish(Status status) const;
  void compute_basic_values();
  /// Fills phase costs of the basic variables; returns total infeasibility.
  double basic_costs(Eigen::VectorXd& cb, bool& phase_one) const;
  /// Reduced costs of all nonbasic columns for the multipliers y.
  void price(const Eigen::VectorXd& y, bool phase_one);
  int choose_entering(double& dq) const;

  const ComputationalForm& form_;
  StartBasis start_;
  const SolverOptions& options_;
  int n_;
  int m_;
  BasisFactor factor_;
  double primal_tol_;
  double dual_tol_;

  std::vector<double> lower_;
  std::vector<double> upper_;
  bool perturbed_ = false;
  bool may_perturb_ = true;
  int stalled_ = 0;

  std::vector<VarState> state_;
  std::vector<double> x_;
  std::vector<int> heads_;
  std::vector<double> weight_;
  /// Reduced costs; in phase 2 kept current across pivots until refactor.
  std::vector<double> d_;
  int iterations_ = 0;
};

// Nonbasic columns sit at the bound their saved state names, or at whichever
// bound is finite now. False when the saved basis does not fit or is singular.
bool PrimalSimplex::load_start() {
  const int nt = total();
  if (!start_.heads || !start_.state) return false;
  if (static_cast<int>(start_.heads->size()) != m_ || static_cast<int>(start_.state->size()) != nt) return false;
  std::vector<bool> seen(nt, false);
  for (int j : *start_.heads) {
    if (j < 0 || j >= nt || seen[j] || (*start_.state)[j] != static_cast<unsigned char>(VarState::basic)) return false;
    seen[j] = true;
  }
  heads_ = *start_.heads;
  for (int j = 0; j < nt; ++j) {
    if (seen[j]) {
      state_[j] = VarState::basic;
      continue;
    }
    const double lo = lower(j), up = upper(j);
    const auto saved = static_cast<VarState>((*start_.state)[j]);
    if (saved == VarState::at_upper && std::isfinite(up)) {
      state_[j] = VarState::at_upper;
      x_[j] = up;
    } else if (std::isfinite(lo)) {
      state_[j] = VarState::at_lower;
      x_[j] = lo;
    } else if (std::isfinite(up)) {
      state_[j] = VarState::at_upper;
      x_[j] = up;
    } else {
      state_[j] = VarState::free_zero;
      x_[j] = 0.0;
    }
  }
  if (!factor_.refactor(heads_)) return false;
  compute_basic_values();
  return true;
}

void PrimalSimplex::place_nonbasic() {
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::at_lower) x_[j] = lower(j);
    else if (state_[j] == VarState::at_upper) x_[j] = upper(j);
  }
  compute_basic_values();
}

void PrimalSimplex::perturb() {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> jitter(1.0, 2.0);
  for (int j = 0; j < total(); ++j) {
    if (lower_[j] == upper_[j]) continue;
    if (std::isfinite(lower_[j])) lower_[j] -= kPerturbation * (1.0 + std::abs(lower_[j])) * jitter(rng);
    if (std::isfinite(upper_[j])) upper_[j] += kPerturbation * (1.0 + std::abs(upper_[j])) * jitter(rng);
  }
  perturbed_ = true;
  may_perturb_ = false;
  place_nonbasic();
}

void PrimalSimplex::unperturb() {
  for (int j = 0; j < total(); ++j) {
    lower_[j] = true_lower(j);
    upper_[j] = true_upper(j);
  }
  perturbed_ = false;
  place_nonbasic();
}

void PrimalSimplex::initialize() {
  const int nt = total();
  lower_.resize(nt);
  upper_.resize(nt);
  for (int j = 0; j < nt; ++j) {
    lower_[j] = true_lower(j);
    upper_[j] = true_upper(j);
  }
  state_.assign(nt, VarState::at_lower);
  x_.assign(nt, 0.0);
  weight_.assign(nt, 1.0);
  heads_.resize(m_);
  if (load_start()) return;
  state_.assign(nt, VarState::at_lower);
  x_.assign(nt, 0.0);
  for (int j = 0; j < n_; ++j) {
    const double lo = lower(j), up = upper(j);
    if (std::isfinite(lo)) {
      state_[j] = VarState::at_lower;
      x_[j] = lo;
    } else if (std::isfinite(up)) {
      state_[j] = VarState::at_upper;
      x_[j] = up;
    } else {
      state_[j] = VarState::free_zero;
      x_[j] = 0.0;
    }
  }
  for (int i = 0; i < m_; ++i) {
    heads_[i] = n_ + i;
    state_[n_ + i] = VarState::basic;
  }
  refactor();
}

CoreResult PrimalSimplex::finish(Status status) const {
  CoreResult result;
  result.status = status;
  result.iterations = iterations_;
  result.heads = heads_;
  result.state.reserve(state_.size());
  for (VarState s : state_) result.state.push_back(static_cast<unsigned char>(s));
  return result;
}

void PrimalSimplex::refactor() {
  if (!factor_.refactor(heads_)) {
    fail(ErrorCode::numerical_failure, "simplex basis became singular");
  }
  compute_basic_values();
}

void PrimalSimplex::compute_basic_values() {
  // A x - s = 0  =>  B x_B = -N x_N
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::basic || x_[j] == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] += x_[j];
    } else {
      for (int k = form_.a.start[j]; k < form_.a.start[j + 1]; ++k) {
        rhs[form_.a.index[k]] -= form_.a.value[k] * x_[j];
      }
    }
  }
  factor_.ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[heads_[i]] = rhs[i];
}

double PrimalSimplex::basic_costs(Eigen::VectorXd& cb, bool& phase_one) const {
  double infeasibility = 0.0;
  cb.setZero(m_);
  for (int i = 0; i < m_; ++i) {
    const int j = heads_[i];
    const double lo = lower(j), up = upper(j);
    if (x_[j] < lo - primal_tol_) {
      cb[i] = -1.0;
      infeasibility += lo - x_[j];
    } else if (x_[j] > up + primal_tol_) {
      cb[i] = 1.0;
      infeasibility += x_[j] - up;
    }
  }
  phase_one = infeasibility > 0.0;
  if (!phase_one) {
    for (int i = 0; i < m_; ++i) cb[i] = cost(heads_[i]);
  }
  return infeasibility;
}

void PrimalSimplex::price(const Eigen::VectorXd& y, bool phase_one) {
  d_.assign(total(), 0.0);
  for (int j = 0; j < total(); ++j) {
    if (state_[j] == VarState::basic) continue;
    d_[j] = (phase_one ? 0.0 : cost(j)) - dot_column(j, y);
  }
}

int PrimalSimplex::choose_entering(double& dq) const {
  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < total(); ++j) {
    const VarState s = state_[j];
    if (s == VarState::basic) continue;
    if (lower(j) == upper(j)) continue;
    const double d = d_[j];
    bool eligible = false;
    if (s == VarState::at_lower) eligible = d < -dual_tol_;
    else if (s == VarState::at_upper) eligible = d > dual_tol_;
    else eligible = std::abs(d) > dual_tol_;
    if (!eligible) continue;
    const double score = d * d / weight_[j];
    if (score > best_score) {
      best_score = score;
      best = j;
      dq = d;
    }
  }
  return best;
}

CoreResult PrimalSimplex::run() {
  initialize();

  Eigen::VectorXd cb(m_), y(m_), alpha(m_), rho(m_);
  bool verified = false;
  bool priced = false;

  for (;;) {
    if (iterations_ >= options_.max_iterations) {
      fail(ErrorCode::numerical_failure, "simplex iteration limit reached");
    }
    if (factor_.num_updates() >= options_.refactor_interval) {
      refactor();
      priced = false;
    }

    bool phase_one = false;
    basic_costs(cb, phase_one);
    if (phase_one || !priced) {
      y = cb;
      factor_.btran(y);
      price(y, phase_one);
      priced = !phase_one;
    }

    double dq = 0.0;
    const int q = choose_entering(dq);
    if (q < 0) {
      if (perturbed_ && !phase_one) {
        // The widened problem contains the exact one, so phase-1 failure
        // carries over; an optimum has to be re-reached on exact bounds.
        unperturb();
        priced = false;
        verified = false;
        continue;
      }
      if (factor_.num_updates() > 0 && !verified) {
        // Confirm on a fresh factorization before declaring termination.
        refactor();
        priced = false;
        verified = true;
        continue;
      }
      if (phase_one) return finish(Status::infeasible);
      y = cb;
      factor_.btran(y);
      CoreResult result = finish(Status::optimal);
      result.x.assign(x_.begin(), x_.begin() + n_);
      double obj = 0.0;
      for (int j = 0; j < n_; ++j) obj += form_.cost[j] * x_[j];
      result.objective = obj;
      result.row_duals.assign(y.data(), y.data() + m_);
      return result;
    }
    verified = false;

    // Direction of the entering variable: +1 increases, -1 decreases.
    const double dir = dq < 0.0 ? 1.0 : -1.0;
    load_column(q, alpha);
    factor_.ftran(alpha);

    // Two-pass Harris ratio test over effective (phase-aware) bounds.
    double tmax = kInf;
    for (int i = 0; i < m_; ++i) {
      const double delta = -dir * alpha[i];
      if (std::abs(delta) <= kPivotTol) continue;
      const int j = heads_[i];
      double lo = lower(j), up = upper(j);
      if (x_[j] < lo - primal_tol_) {
        up = lo;
        lo = -kInf;
      } else if (x_[j] > up + primal_tol_) {
        lo = up;
        up = kInf;
      }
      if (delta > 0.0 && std::isfinite(up)) {
        tmax = std::min(tmax, (up - x_[j] + primal_tol_) / delta);
      } else if (delta < 0.0 && std::isfinite(lo)) {
        tmax = std::min(tmax, (x_[j] - lo + primal_tol_) / -delta);
      }
    }

    const double range = upper(q) - lower(q);
    int leave_row = -1;
    double step = 0.0;
    double leave_bound = 0.0;
    bool leave_at_upper = false;
    if (std::isfinite(tmax)) {
      double best_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double delta = -dir * alpha[i];
        if (std::abs(delta) <= kPivotTol) continue;
        const int j = heads_[i];
        double lo = lower(j), up = upper(j);
        bool hits_lower_of_real = true;
        if (x_[j] < lo - primal_tol_) {
          up = lo;
          lo = -kInf;
        } else if (x_[j] > up + primal_tol_) {
          lo = up;
          up = kInf;
        }
        double ratio = kInf;
        double bound = 0.0;
        if (delta > 0.0 && std::isfinite(up)) {
          ratio = (up - x_[j]) / delta;
          bound = up;
          hits_lower_of_real = (bound == lower(j));
        } else if (delta < 0.0 && std::isfinite(lo)) {
          ratio = (x_[j] - lo) / -delta;
          bound = lo;
          hits_lower_of_real = (bound == lower(j));
        } else {
          continue;
        }
        if (ratio <= tmax && std::abs(delta) > best_pivot) {
          best_pivot = std::abs(delta);
          leave_row = i;
          step = std::max(ratio, 0.0);
          leave_bound = bound;
          leave_at_upper = !hits_lower_of_real;
        }
      }
    }

    const bool flip = std::isfinite(range) && (leave_row < 0 || range <= step);
    if (!flip && leave_row < 0) {
      if (phase_one) {
        fail(ErrorCode::numerical_failure, "unbounded ray during phase 1");
      }
      if (perturbed_) {
        // Rays do not depend on finite bounds; re-detect from an exact point.
        unperturb();
        priced = false;
        continue;
      }
      return finish(Status::unbounded);
    }

    ++iterations_;
    if (flip) step = range;
    stalled_ = step <= primal_tol_ ? stalled_ + 1 : 0;
    x_[q] += dir * step;
    for (int i = 0; i < m_; ++i) x_[heads_[i]] -= dir * step * alpha[i];

    if (flip) {
      state_[q] = dir > 0 ? VarState::at_upper : VarState::at_lower;
      x_[q] = dir > 0 ? upper(q) : lower(q);
      continue;
    }

    // Devex reference weights and phase-2 reduced costs from the pivot row.
    rho.setZero(m_);
    rho[leave_row] = 1.0;
    factor_.btran(rho);
    const double alpha_r = alpha[leave_row];
    const double wq = weight_[q];
    const double theta_d = dq / alpha_r;
    bool reset = false;
    for (int j = 0; j < total(); ++j) {
      if (state_[j] == VarState::basic || j == q) continue;
      const double arj = dot_column(j, rho);
      if (arj == 0.0) continue;
      if (priced) d_[j] -= theta_d * arj;
      const double ratio = arj / alpha_r;
      weight_[j] = std::max(weight_[j], ratio * ratio * wq);
      if (weight_[j] > kDevexReset) reset = true;
    }

    const int leaving = heads_[leave_row];
    if (priced) {
      d_[leaving] = -theta_d;
      d_[q] = 0.0;
    }
    x_[leaving] = leave_bound;
    state_[leaving] = leave_at_upper ? VarState::at_upper : VarState::at_lower;
    weight_[leaving] = std::max(wq / (alpha_r * alpha_r), 1.0);
    heads_[leave_row] = q;
    state_[q] = VarState::basic;
    if (reset) std::fill(weight_.begin(), weight_.end(), 1.0);

    factor_.update(leave_row, alpha);

    if (stalled_ >= kStallLimit && may_perturb_) {
      stalled_ = 0;
      perturb();
      priced = false;
    }
  }
}

}  // namespace

CoreResult run_simplex(const ComputationalForm& form, const SolverOptions& options, StartBasis start) {
  if (form.a.rows == 0) {
    // Separable: each variable sits at whichever bound its cost prefers.
    CoreResult result;
    result.status = Status::optimal;
    result.x.resize(form.a.cols);
    for (int j = 0; j < form.a.cols; ++j) {
      const double c = form.cost[j], lo = form.col_lower[j], up = form.col_upper[j];
      double v = std::isfinite(lo) ? lo : (std::isfinite(up) ? up : 0.0);
      if (c > 0.0) v = lo;
      if (c < 0.0) v = up;
      if (!std::isfinite(v)) {
        result.status = Status::unbounded;
        result.x.clear();
        return result;
      }
      result.x[j] = v;
      result.objective += c * v;
    }
    return result;
  }
  PrimalSimplex simplex(form, options, start);
  return simplex.run();
}

}  // namespace robustprice::lp::detail
