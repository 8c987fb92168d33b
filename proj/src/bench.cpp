#include "robustprice/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "robustprice/error.hpp"

namespace robustprice {

namespace {

const std::array<CriterionSpec, 3> kFocal = {CriterionSpec::revenue(), CriterionSpec::regret(), CriterionSpec::ratio()};

double clean_param(double x) { return std::round(x * 1e12) / 1e12; }

std::string cache_key(const FamilyTag& tag, const BenchConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << to_string(tag.kind);
  for (double p : tag.params) out << ',' << p;
  const RobustOptions& r = config.robust;
  out << "|K=" << config.K << "|eps=" << r.eps << "|zero=" << r.zero_tol << "|bis=" << r.max_bisection
      << "|feas=" << r.lp.feasibility_tol << "|opt=" << r.lp.optimality_tol
      << "|ratio=" << (r.ratio_method == RatioMethod::search ? "search" : "direct");
  return out.str();
}

// Feasible instances of a family in grid order, plus the ones screened out.
struct Screened {
  std::vector<std::shared_ptr<InstanceCache::Entry>> entries;
  std::vector<FamilyTag> skipped;
};

}  // namespace

struct InstanceCache::Entry {
  FamilyTag tag;
  UncertaintySet set;
  RobustOptions options;
  std::recursive_mutex mutex;
  std::optional<RobustSummary> summary;
  std::array<std::array<std::optional<double>, 3>, 3> cross;
  std::optional<BestOfAllResult> best;
  std::optional<std::array<double, 3>> focal;
  std::optional<double> best_all;
  lp::WarmStart cross_warm;

  Entry(FamilyTag t, UncertaintySet s, RobustOptions o)
      : tag(std::move(t)), set(std::move(s)), options(std::move(o)) {}
};

namespace {

Screened screen(const std::vector<FamilyTag>& tags, const BenchConfig& config, InstanceCache& cache) {
  Screened out;
  for (const FamilyTag& tag : tags) {
    auto entry = cache.get(tag, config);
    if (entry) {
      out.entries.push_back(std::move(entry));
    } else {
      out.skipped.push_back(tag);
    }
  }
  return out;
}

double best_relperf_all(InstanceCache& cache, InstanceCache::Entry& e) {
  std::lock_guard lock(e.mutex);
  if (!e.best_all) {
    const BestOfAllResult& b = cache.best(e);
    e.best_all = relperf_all(b.mech, e.set, b.summary, e.options).all();
  }
  return *e.best_all;
}

}  // namespace

ParamGrid ParamGrid::parse(const std::string& text) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  in >> start >> c1 >> stop >> c2 >> step;
  if (!in || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    fail(ErrorCode::invalid_input, "grid: expected start:stop:step, got '" + text + "'");
  }
  if (!(step > 0.0) || !(start <= stop) || !std::isfinite(stop)) {
    fail(ErrorCode::invalid_input, "grid: need step > 0 and start <= stop");
  }
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > 10000) fail(ErrorCode::invalid_input, "grid: more than 10000 points");
  ParamGrid g;
  g.values.clear();
  for (int i = 0; i < static_cast<int>(count); ++i) g.values.push_back(clean_param(start + i * step));
  return g;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ROBUSTPRICE_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  workers = std::max(1, std::min(workers, count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !stop; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          stop = true;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<FamilyTag> family_instances(FamilyKind family, const ParamGrid& grid) {
  std::vector<FamilyTag> out;
  if (family == FamilyKind::general) fail(ErrorCode::invalid_input, "family 'general' has no parameter grid");
  for (double x : grid.values) {
    if (family == FamilyKind::mean_var) {
      for (double s : grid.values) out.push_back({family, {x, s}});
    } else {
      out.push_back({family, {x}});
    }
  }
  return out;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::shared_ptr<InstanceCache::Entry> InstanceCache::get(const FamilyTag& tag, const BenchConfig& config) {
  const std::string key = cache_key(tag, config);
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  UncertaintySet set = make_family(tag, config.K);
  std::shared_ptr<Entry> entry;
  if (check_feasible(set, config.robust.lp)) entry = std::make_shared<Entry>(tag, std::move(set), config.robust);
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, entry).first->second;
}

const RobustSummary& InstanceCache::summary(Entry& e) {
  std::lock_guard lock(e.mutex);
  if (!e.summary) e.summary = robust_summary(e.set, e.options);
  return *e.summary;
}

double InstanceCache::cross_cell(Entry& e, int old_index, int new_index) {
  std::lock_guard lock(e.mutex);
  auto& cell = e.cross.at(old_index).at(new_index);
  if (!cell) cell = cross_performance(e.set, summary(e), kFocal[old_index], kFocal[new_index], e.options, &e.cross_warm).relperf;
  return *cell;
}

const BestOfAllResult& InstanceCache::best(Entry& e) {
  std::lock_guard lock(e.mutex);
  if (!e.best) e.best = best_of_all(e.set, summary(e), e.options);
  return *e.best;
}

const std::array<double, 3>& InstanceCache::focal(Entry& e) {
  std::lock_guard lock(e.mutex);
  if (!e.focal) {
    const RobustSummary& s = summary(e);
    std::array<double, 3> f{};
    for (int i = 0; i < 3; ++i) f[i] = relperf_all(s.mechanism(kFocalKinds[i]), e.set, s, e.options).all();
    e.focal = f;
  }
  return *e.focal;
}

CrossMatrix cross_matrix(FamilyKind family, const ParamGrid& grid, const BenchConfig& config, InstanceCache& cache) {
  const Screened s = screen(family_instances(family, grid), config, cache);
  if (s.entries.empty()) fail(ErrorCode::infeasible_set, std::string("no feasible ") + to_string(family) + " instance");
  parallel_for(static_cast<int>(s.entries.size()), resolve_workers(config.workers), [&](int n) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cache.cross_cell(*s.entries[n], i, j);
    }
  });
  CrossMatrix m;
  m.family = family;
  m.skipped = s.skipped;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m.cell[i][j] = 2.0;
      for (const auto& e : s.entries) {
        const double v = cache.cross_cell(*e, i, j);
        if (v < m.cell[i][j]) {
          m.cell[i][j] = v;
          m.argmin[i][j] = e->tag;
        }
      }
    }
  }
  return m;
}

Theorem1Result theorem1_bounds(FamilyKind family, const ParamGrid& grid, const BenchConfig& config,
                               InstanceCache& cache) {
  const Screened s = screen(family_instances(family, grid), config, cache);
  if (s.entries.empty()) fail(ErrorCode::infeasible_set, std::string("no feasible ") + to_string(family) + " instance");
  parallel_for(static_cast<int>(s.entries.size()), resolve_workers(config.workers),
               [&](int n) { cache.best(*s.entries[n]); });
  Theorem1Result r;
  r.skipped = s.skipped;
  r.bound = 2.0;
  for (const auto& e : s.entries) {
    const double c = cache.best(*e).c_star;
    r.per_instance.emplace_back(e->tag, c);
    if (c < r.bound) {
      r.bound = c;
      r.argmin = e->tag;
    }
  }
  return r;
}

std::vector<FamilyTag> sweep_instances(FamilyKind family, const ParamGrid& grid, double sigma) {
  if (family != FamilyKind::mean_var) return family_instances(family, grid);
  std::vector<FamilyTag> out;
  for (double mu : grid.values) out.push_back({family, {mu, sigma}});
  return out;
}

std::vector<SweepRow> sweep(const std::vector<FamilyTag>& instances, const BenchConfig& config, InstanceCache& cache) {
  const Screened s = screen(instances, config, cache);
  parallel_for(static_cast<int>(s.entries.size()), resolve_workers(config.workers), [&](int n) {
    cache.focal(*s.entries[n]);
    best_relperf_all(cache, *s.entries[n]);
  });
  std::vector<SweepRow> rows;
  for (const auto& e : s.entries) {
    const RobustSummary& sum = cache.summary(*e);
    const auto& f = cache.focal(*e);
    rows.push_back({e->tag, e->tag.params.at(0), f[0], f[1], f[2], best_relperf_all(cache, *e), sum.theta_revenue,
                    sum.theta_regret, sum.theta_ratio});
  }
  return rows;
}

FocalValues focal_values(FamilyKind family, const ParamGrid& grid, const BenchConfig& config, InstanceCache& cache) {
  const Screened s = screen(family_instances(family, grid), config, cache);
  if (s.entries.empty()) fail(ErrorCode::infeasible_set, std::string("no feasible ") + to_string(family) + " instance");
  parallel_for(static_cast<int>(s.entries.size()), resolve_workers(config.workers),
               [&](int n) { cache.focal(*s.entries[n]); });
  FocalValues out;
  out.min_relperf_all = {2.0, 2.0, 2.0};
  for (const auto& e : s.entries) {
    const auto& f = cache.focal(*e);
    for (int i = 0; i < 3; ++i) {
      if (f[i] < out.min_relperf_all[i]) {
        out.min_relperf_all[i] = f[i];
        out.argmin[i] = e->tag;
      }
    }
  }
  return out;
}

MechanismTable export_mechanisms(const UncertaintySet& set, const RobustOptions& options) {
  const BestOfAllResult best = best_of_all(set, options);
  const RobustSummary& s = best.summary;
  MechanismTable t;
  t.values = set.grid().points();
  const std::array<const Mechanism*, 4> mechs = {&s.mech_revenue, &s.mech_regret, &s.mech_ratio, &best.mech};
  for (int i = 0; i < 4; ++i) {
    t.cdf[i] = mechs[i]->cdf();
    t.relperf_all[i] = relperf_all(*mechs[i], set, s, options).all();
  }
  return t;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

namespace {

std::string two_decimals(double x) {
  char buf[32];
  const double r = round2(x);
  std::snprintf(buf, sizeof buf, "%.2f", r == 0.0 ? 0.0 : r);
  return buf;
}

}  // namespace

std::string to_csv(const CrossMatrix& m) {
  std::ostringstream out;
  out << "mechanism";
  for (const auto& c : kFocal) out << ',' << c.name();
  for (const auto& c : kFocal) out << ',' << c.name() << "_2dp";
  for (const auto& c : kFocal) out << ',' << c.name() << "_argmin";
  out << '\n';
  for (int i = 0; i < 3; ++i) {
    out << kFocal[i].name();
    for (int j = 0; j < 3; ++j) out << ',' << format_number(m.cell[i][j]);
    for (int j = 0; j < 3; ++j) out << ',' << two_decimals(m.cell[i][j]);
    for (int j = 0; j < 3; ++j) out << ",\"" << m.argmin[i][j].label() << '"';
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "parameter,mechanism,relperf_all\n";
  for (const SweepRow& r : rows) {
    const std::array<std::pair<const char*, double>, 4> cols = {
        {{"revenue", r.revenue}, {"regret", r.regret}, {"ratio", r.ratio}, {"all", r.all}}};
    for (const auto& [name, v] : cols) out << format_number(r.parameter) << ',' << name << ',' << format_number(v) << '\n';
  }
  return out.str();
}

std::string to_csv(const MechanismTable& t) {
  static constexpr std::array<const char*, 4> kNames = {"revenue", "regret", "ratio", "all"};
  std::ostringstream out;
  out << "value";
  for (int i = 0; i < 4; ++i) out << ',' << kNames[i] << " (" << two_decimals(t.relperf_all[i]) << ')';
  out << '\n';
  for (std::size_t v = 0; v < t.values.size(); ++v) {
    out << format_number(t.values[v]);
    for (int i = 0; i < 4; ++i) out << ',' << format_number(t.cdf[i][v]);
    out << '\n';
  }
  return out.str();
}

}  // namespace robustprice
