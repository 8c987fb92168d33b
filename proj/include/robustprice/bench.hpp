#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "robustprice/cross.hpp"
#include "robustprice/instance.hpp"
#include "robustprice/multi.hpp"
#include "robustprice/robust.hpp"

namespace robustprice {

/// Instance parameters to iterate over; defaults to 0.1, 0.2, ..., 0.9.
struct ParamGrid {
  std::vector<double> values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  /// "start:stop:step", inclusive of stop up to rounding.
  static ParamGrid parse(const std::string& text);
};

struct BenchConfig {
  int K = 100;
  RobustOptions robust;
  /// 0 picks ROBUSTPRICE_WORKERS, else the hardware thread count.
  int workers = 0;
};

/// Worker count after applying ROBUSTPRICE_WORKERS.
int resolve_workers(int requested);

/// Runs job(0..count-1) on a pool of `workers` threads. The first exception
/// thrown by any job is rethrown after all workers stop.
void parallel_for(int count, int workers, const std::function<void(int)>& job);

/// One instance per parameter (mean_var: every (mu, sigma) pair).
std::vector<FamilyTag> family_instances(FamilyKind family, const ParamGrid& grid);

/// Two-decimal rounding, halves away from zero.
double round2(double x);

inline constexpr std::array<CriterionSpec::Kind, 3> kFocalKinds = {
    CriterionSpec::Kind::revenue, CriterionSpec::Kind::regret, CriterionSpec::Kind::ratio};

/// Per-instance results computed on demand and reused across tables,
/// bounds and sweeps. Keyed by instance label, K and tolerances.
class InstanceCache {
 public:
  struct Entry;

  /// nullptr when the set is empty.
  std::shared_ptr<Entry> get(const FamilyTag& tag, const BenchConfig& config);

  const RobustSummary& summary(Entry& e);
  /// relperf of the best old-optimal mechanism under `next`.
  double cross_cell(Entry& e, int old_index, int new_index);
  const BestOfAllResult& best(Entry& e);
  /// relperf_all of the revenue-, regret- and ratio-optimal mechanisms.
  const std::array<double, 3>& focal(Entry& e);

 private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
};

struct CrossMatrix {
  FamilyKind family = FamilyKind::mean;
  /// cell[row][col]: row = mechanism criterion, col = evaluated criterion.
  std::array<std::array<double, 3>, 3> cell{};
  std::array<std::array<FamilyTag, 3>, 3> argmin{};
  std::vector<FamilyTag> skipped;
};

CrossMatrix cross_matrix(FamilyKind family, const ParamGrid& grid, const BenchConfig& config, InstanceCache& cache);

struct Theorem1Result {
  double bound = 1.0;
  FamilyTag argmin;
  std::vector<std::pair<FamilyTag, double>> per_instance;
  std::vector<FamilyTag> skipped;
};

/// min over instances of c*.
Theorem1Result theorem1_bounds(FamilyKind family, const ParamGrid& grid, const BenchConfig& config,
                               InstanceCache& cache);

struct SweepRow {
  FamilyTag tag;
  double parameter = 0.0;
  /// relperf_all of the revenue-, regret-, ratio-optimal and uniformly robust mechanisms.
  double revenue = 0.0;
  double regret = 0.0;
  double ratio = 0.0;
  double all = 0.0;
  double theta_revenue = 0.0;
  double theta_regret = 0.0;
  double theta_ratio = 0.0;
};

/// Figure data over the given instances; `parameter` is the first family
/// parameter (mu for the mean-variance panel). Infeasible instances are skipped.
std::vector<SweepRow> sweep(const std::vector<FamilyTag>& instances, const BenchConfig& config, InstanceCache& cache);

/// Mean-variance panel with fixed sigma, other families one row per parameter.
std::vector<FamilyTag> sweep_instances(FamilyKind family, const ParamGrid& grid, double sigma);

struct FocalValues {
  std::array<double, 3> min_relperf_all{1.0, 1.0, 1.0};
  std::array<FamilyTag, 3> argmin{};
};

/// Worst relperf_all of each focal mechanism over the family's instances.
FocalValues focal_values(FamilyKind family, const ParamGrid& grid, const BenchConfig& config, InstanceCache& cache);

struct MechanismTable {
  std::vector<double> values;
  /// CDF columns: revenue-, regret-, ratio-optimal, uniformly robust.
  std::array<std::vector<double>, 4> cdf;
  std::array<double, 4> relperf_all{};
};

MechanismTable export_mechanisms(const UncertaintySet& set, const RobustOptions& options = {});

// CSV renderers. Floats carry 12 significant digits.
std::string to_csv(const CrossMatrix& m);
std::string to_csv(const std::vector<SweepRow>& rows);
std::string to_csv(const MechanismTable& t);

/// 12 significant digits, shortest form.
std::string format_number(double x);

}  // namespace robustprice
