#include "robustprice/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustprice/bench.hpp"
#include "robustprice/cross.hpp"
#include "robustprice/error.hpp"
#include "robustprice/instance.hpp"
#include "robustprice/multi.hpp"
#include "robustprice/robust.hpp"

namespace robustprice::cli {

namespace {

using json = nlohmann::ordered_json;

struct Config {
  int K = 100;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double eps = 1e-4;
  int workers = 0;
  std::string ratio_method = "search";
  std::string out;

  RobustOptions robust() const {
    RobustOptions o;
    o.lp.feasibility_tol = feasibility_tol;
    o.lp.optimality_tol = optimality_tol;
    o.eps = eps;
    o.ratio_method = ratio_method == "direct" ? RatioMethod::direct : RatioMethod::search;
    return o;
  }

  BenchConfig bench() const { return {K, robust(), workers}; }
};

[[noreturn]] void invalid(const std::string& message) { fail(ErrorCode::invalid_input, message); }

/// 12 significant digits; non-finite values become null.
json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

json num_array(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

json config_json(const Config& c) {
  const RobustOptions o = c.robust();
  return {{"K", c.K},
          {"feasibility_tol", num(o.lp.feasibility_tol)},
          {"optimality_tol", num(o.lp.optimality_tol)},
          {"eps", num(o.eps)},
          {"zero_tol", num(o.zero_tol)},
          {"max_bisection", o.max_bisection},
          {"ratio_method", c.ratio_method},
          {"workers", resolve_workers(c.workers)}};
}

json mechanism_json(const Mechanism& m) {
  return {{"grid", {{"points", num_array(m.grid().points())}}}, {"weights", num_array(m.weights())}};
}

json tag_json(const FamilyTag& t) { return {{"kind", to_string(t.kind)}, {"params", num_array(t.params)}}; }

// ---- reading documents -----------------------------------------------------

json load_json(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) invalid(what + ": cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    invalid(what + ": '" + path + "' is not valid JSON (" + e.what() + ")");
  }
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) invalid(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) invalid(path + "." + key + ": missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) invalid(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(path + ": not finite");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) invalid(path + ": expected an integer");
  return v.get<int>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path + ": expected an array");
  return v;
}

std::vector<double> numbers(const json& v, const std::string& path) {
  std::vector<double> out;
  const json& a = array(v, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Library validation messages name the offending field; prefix the document path.
template <class F>
auto within(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::invalid_input) throw;
    throw Error(ErrorCode::invalid_input, path + ": " + e.what());
  }
}

ValueGrid parse_grid(const json& g, const std::string& path) {
  if (!g.is_object()) invalid(path + ": expected an object");
  if (g.contains("points")) {
    if (g.contains("a") || g.contains("b") || g.contains("K")) invalid(path + ": give either points or a, b, K");
    std::vector<double> pts = numbers(g["points"], path + ".points");
    return within(path, [&] { return ValueGrid::from_points(std::move(pts)); });
  }
  const double a = number(field(g, "a", path), path + ".a");
  const double b = number(field(g, "b", path), path + ".b");
  const int K = integer(field(g, "K", path), path + ".K");
  return within(path, [&] { return make_grid(a, b, K); });
}

FamilyTag parse_tag(const json& t, const std::string& path) {
  FamilyTag tag;
  const json& kind = field(t, "kind", path);
  if (!kind.is_string()) invalid(path + ".kind: expected a string");
  tag.kind = within(path + ".kind", [&] { return family_from_string(kind.get<std::string>()); });
  if (t.contains("params")) tag.params = numbers(t["params"], path + ".params");
  return tag;
}

UncertaintySet parse_instance(const json& doc, const std::string& path) {
  if (!doc.is_object()) invalid(path + ": expected an object");
  std::optional<FamilyTag> tag;
  if (doc.contains("family_tag")) tag = parse_tag(doc["family_tag"], path + ".family_tag");

  if (!doc.contains("grid")) {
    // Family shorthand: {"family_tag": {...}, "K": 100}.
    if (!tag || tag->kind == FamilyKind::general) invalid(path + ".grid: missing");
    if (doc.contains("moments") || doc.contains("quantiles")) invalid(path + ": moments and quantiles need a grid");
    const int K = doc.contains("K") ? integer(doc["K"], path + ".K") : 100;
    return within(path, [&] { return make_family(*tag, K); });
  }
  if (doc.contains("K")) invalid(path + ".K: only allowed with the family shorthand; put K inside grid");

  ValueGrid grid = parse_grid(doc["grid"], path + ".grid");
  std::vector<MomentConstraint> moments;
  if (doc.contains("moments")) {
    const json& ms = array(doc["moments"], path + ".moments");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const std::string p = path + ".moments[" + std::to_string(k) + "]";
      moments.push_back({integer(field(ms[k], "order", p), p + ".order"), number(field(ms[k], "value", p), p + ".value")});
    }
  }
  std::vector<QuantileConstraint> quantiles;
  if (doc.contains("quantiles")) {
    const json& qs = array(doc["quantiles"], path + ".quantiles");
    for (std::size_t j = 0; j < qs.size(); ++j) {
      const std::string p = path + ".quantiles[" + std::to_string(j) + "]";
      quantiles.push_back({number(field(qs[j], "location", p), p + ".location"), number(field(qs[j], "prob", p), p + ".prob"), 0});
    }
  }
  return within(path, [&] {
    return UncertaintySet(std::move(grid), std::move(moments), std::move(quantiles), tag.value_or(FamilyTag{}));
  });
}

/// Accepts a bare mechanism or any document holding one under "mechanism".
/// Without a grid the mechanism lives on the instance's grid.
Mechanism parse_mechanism(const json& doc, const ValueGrid& instance_grid, const std::string& file) {
  std::string path = "mechanism";
  const json* m = &doc;
  if (doc.is_object() && doc.contains("mechanism")) {
    m = &doc["mechanism"];
  } else if (doc.is_object() && doc.contains("results")) {
    invalid(file + ": holds several mechanisms; pass a single-criterion document");
  }
  if (!m->is_object()) invalid(path + ": expected an object");
  // Documents carry 12 significant digits, so grids match up to 1e-9 and the
  // instance's exact points are used.
  const ValueGrid& grid = instance_grid;
  if (m->contains("grid")) {
    const ValueGrid given = parse_grid((*m)["grid"], path + ".grid");
    bool same = given.size() == grid.size();
    for (int i = 0; same && i < grid.size(); ++i) same = std::abs(given[i] - grid[i]) <= 1e-9 * std::max(1.0, grid[i]);
    if (!same) invalid(path + ".grid: does not match the instance grid");
  }
  const std::vector<double> w = numbers(field(*m, "weights", path), path + ".weights");
  if (static_cast<int>(w.size()) != grid.size()) {
    invalid(path + ".weights: expected " + std::to_string(grid.size()) + " entries, got " + std::to_string(w.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) {
      invalid(path + ".weights[" + std::to_string(i) + "]: negative weight " + format_number(w[i]));
    }
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    invalid(path + ".weights: sum " + format_number(sum) + " differs from 1 by more than 1e-9");
  }
  return within(path, [&] { return Mechanism(grid, w); });
}

// ---- writing ----------------------------------------------------------------

void emit(const Config& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out);
  if (!file) invalid("--out: cannot write '" + c.out + "'");
  file << text;
}

void emit(const Config& c, const json& doc, std::ostream& out) { emit(c, doc.dump(2) + "\n", out); }

void report_skipped(const Config& c, const std::vector<FamilyTag>& skipped, std::ostream& err) {
  if (skipped.empty()) return;
  err << "skipped " << skipped.size() << " infeasible instance(s):";
  for (const FamilyTag& t : skipped) err << ' ' << t.label();
  err << '\n';
  if (c.out.empty()) return;
  const std::size_t dot = c.out.find_last_of('.');
  const std::string path = (dot == std::string::npos ? c.out : c.out.substr(0, dot)) + ".skipped.csv";
  std::ofstream file(path);
  if (!file) invalid("--out: cannot write '" + path + "'");
  file << "instance\n";
  for (const FamilyTag& t : skipped) file << '"' << t.label() << "\"\n";
}

const std::array<CriterionSpec, 3> kFocal = {CriterionSpec::revenue(), CriterionSpec::regret(), CriterionSpec::ratio()};

CriterionSpec parse_criterion(const std::string& text, const std::string& flag) {
  return within(flag, [&] { return CriterionSpec::parse(text); });
}

CriterionSpec focal_criterion(const std::string& text, const std::string& flag) {
  const CriterionSpec c = parse_criterion(text, flag);
  if (c.kind == CriterionSpec::Kind::lambda_regret) invalid(flag + ": expected revenue, regret or ratio");
  return c;
}

// ---- subcommands ------------------------------------------------------------

json solve_one(const UncertaintySet& set, const CriterionSpec& c, const RobustOptions& o) {
  RobustMechanism r{0.0, Mechanism::point_mass(set.grid(), 0), 0};
  switch (c.kind) {
    case CriterionSpec::Kind::revenue: r = maximin_revenue(set, o); break;
    case CriterionSpec::Kind::regret: r = minimax_regret(set, o); break;
    case CriterionSpec::Kind::ratio: r = maximin_ratio(set, o); break;
    case CriterionSpec::Kind::lambda_regret: r = minimax_lambda_regret(set, c.lambda, o); break;
  }
  return {{"criterion", c.name()}, {"value", num(r.value)}, {"lp_solves", r.lp_solves}, {"mechanism", mechanism_json(r.mechanism)}};
}

int cmd_solve(const Config& c, const std::string& instance, const std::string& criterion, std::ostream& out) {
  const UncertaintySet set = parse_instance(load_json(instance, "--instance"), "instance");
  const RobustOptions o = c.robust();
  json doc = {{"command", "solve"}, {"instance", instance}};
  if (criterion == "all") {
    const RobustSummary s = robust_summary(set, o);
    json results = json::array();
    for (const CriterionSpec& k : kFocal) {
      results.push_back({{"criterion", k.name()}, {"value", num(s.theta(k.kind))}, {"mechanism", mechanism_json(s.mechanism(k.kind))}});
    }
    doc["results"] = results;
    doc["lp_solves"] = s.lp_solves;
  } else {
    const json one = solve_one(set, parse_criterion(criterion, "--criterion"), o);
    doc.update(one);
  }
  doc["config"] = config_json(c);
  emit(c, doc, out);
  return kOk;
}

int cmd_evaluate(const Config& c, const std::string& instance, const std::string& mechanism, const std::string& criterion,
                 std::ostream& out) {
  const UncertaintySet set = parse_instance(load_json(instance, "--instance"), "instance");
  const Mechanism phi = parse_mechanism(load_json(mechanism, "--mechanism"), set.grid(), mechanism);
  const RobustOptions o = c.robust();
  json doc = {{"command", "evaluate"}, {"instance", instance}, {"mechanism", mechanism}};
  if (criterion == "all") {
    const RobustSummary s = robust_summary(set, o);
    json values = json::object();
    for (const CriterionSpec& k : kFocal) values[k.name()] = num(worst_value(phi, set, k, o));
    const AllCriteria r = relperf_all(phi, set, s, o);
    doc["criterion"] = "all";
    doc["value"] = values;
    doc["relperf"] = {{"revenue", num(r.revenue)}, {"regret", num(r.regret)}, {"ratio", num(r.ratio)}, {"all", num(r.all())}};
  } else {
    const CriterionSpec k = parse_criterion(criterion, "--criterion");
    const double value = worst_value(phi, set, k, o);
    doc["criterion"] = k.name();
    doc["value"] = num(value);
    if (k.kind == CriterionSpec::Kind::lambda_regret) {
      doc["optimum"] = num(minimax_lambda_regret(set, k.lambda, o).value);
      doc["relperf"] = nullptr;
    } else {
      const RobustSummary s = robust_summary(set, o);
      doc["optimum"] = num(s.theta(k.kind));
      doc["relperf"] = num(relperf(value, s.theta(k.kind), k, 1e-6, o.zero_tol));
    }
  }
  doc["config"] = config_json(c);
  emit(c, doc, out);
  return kOk;
}

int cmd_cross(const Config& c, const std::string& instance, const std::string& old_text, const std::string& new_text,
              std::ostream& out) {
  const CriterionSpec old_c = focal_criterion(old_text, "--old");
  const CriterionSpec new_c = focal_criterion(new_text, "--new");
  const UncertaintySet set = parse_instance(load_json(instance, "--instance"), "instance");
  const RobustOptions o = c.robust();
  const RobustSummary s = robust_summary(set, o);
  const CrossResult r = cross_performance(set, s, old_c, new_c, o);
  const json doc = {{"command", "cross"},
                    {"instance", instance},
                    {"old_criterion", old_c.name()},
                    {"new_criterion", new_c.name()},
                    {"raw_value", num(r.raw_value)},
                    {"optimum", num(s.theta(new_c.kind))},
                    {"relperf", num(r.relperf)},
                    {"relperf_2dp", num(round2(r.relperf))},
                    {"witness", mechanism_json(r.witness)},
                    {"config", config_json(c)}};
  emit(c, doc, out);
  return kOk;
}

int cmd_best(const Config& c, const std::string& instance, std::ostream& out) {
  const UncertaintySet set = parse_instance(load_json(instance, "--instance"), "instance");
  const RobustOptions o = c.robust();
  const BestOfAllResult r = best_of_all(set, o);
  const AllCriteria rel = relperf_all(r.mech, set, r.summary, o);
  const json doc = {
      {"command", "best"},
      {"instance", instance},
      {"c_star", num(r.c_star)},
      {"c_star_2dp", num(round2(r.c_star))},
      {"bracket", {num(r.bracket_lo), num(r.bracket_hi)}},
      {"probes", r.probes},
      {"theta", {{"revenue", num(r.summary.theta_revenue)}, {"regret", num(r.summary.theta_regret)}, {"ratio", num(r.summary.theta_ratio)}}},
      {"relperf", {{"revenue", num(rel.revenue)}, {"regret", num(rel.regret)}, {"ratio", num(rel.ratio)}, {"all", num(rel.all())}}},
      {"mechanism", mechanism_json(r.mech)},
      {"config", config_json(c)}};
  emit(c, doc, out);
  return kOk;
}

FamilyKind parse_family(const std::string& name) {
  const FamilyKind k = within("--family", [&] { return family_from_string(name); });
  if (k == FamilyKind::general) invalid("--family: expected mean, mean_var, median or lower_bound");
  return k;
}

ParamGrid parse_param_grid(const std::string& text) {
  if (text.empty()) return {};
  return within("--grid", [&] { return ParamGrid::parse(text); });
}

int cmd_table(const Config& c, const std::string& family, const std::string& grid, std::ostream& out, std::ostream& err) {
  InstanceCache cache;
  const CrossMatrix m = cross_matrix(parse_family(family), parse_param_grid(grid), c.bench(), cache);
  emit(c, to_csv(m), out);
  report_skipped(c, m.skipped, err);
  return kOk;
}

int cmd_theorem1(const Config& c, const std::string& family, const std::string& grid, std::ostream& out) {
  InstanceCache cache;
  const Theorem1Result r = theorem1_bounds(parse_family(family), parse_param_grid(grid), c.bench(), cache);
  json per = json::array();
  for (const auto& [tag, cs] : r.per_instance) per.push_back({{"instance", tag_json(tag)}, {"c_star", num(cs)}});
  json skipped = json::array();
  for (const FamilyTag& t : r.skipped) skipped.push_back(tag_json(t));
  const json doc = {{"command", "theorem1"},
                    {"family", family},
                    {"bound", num(r.bound)},
                    {"bound_2dp", num(round2(r.bound))},
                    {"argmin", tag_json(r.argmin)},
                    {"per_instance", per},
                    {"skipped", skipped},
                    {"config", config_json(c)}};
  emit(c, doc, out);
  return kOk;
}

int cmd_figure(const Config& c, const std::string& family, const std::string& grid, double sigma, std::ostream& out,
               std::ostream& err) {
  InstanceCache cache;
  const auto tags = sweep_instances(parse_family(family), parse_param_grid(grid), sigma);
  const auto rows = sweep(tags, c.bench(), cache);
  std::vector<FamilyTag> skipped;
  for (const FamilyTag& t : tags) {
    if (std::none_of(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.tag.params == t.params; })) {
      skipped.push_back(t);
    }
  }
  emit(c, to_csv(rows), out);
  report_skipped(c, skipped, err);
  return kOk;
}

int cmd_figure2(const Config& c, const std::string& instance, std::ostream& out) {
  const UncertaintySet set = parse_instance(load_json(instance, "--instance"), "instance");
  emit(c, to_csv(export_mechanisms(set, c.robust())), out);
  return kOk;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return kInvalidInput;
    case ErrorCode::infeasible_set: return kInfeasibleSet;
    default: return kNumericalFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust pricing mechanisms under moment and quantile uncertainty", "robustprice"};
  app.require_subcommand(1);
  app.fallthrough();

  Config c;
  app.add_option("--K", c.K, "Grid intervals for family instances")->check(CLI::PositiveNumber);
  app.add_option("--feasibility-tol", c.feasibility_tol, "LP primal feasibility tolerance")->check(CLI::PositiveNumber);
  app.add_option("--optimality-tol", c.optimality_tol, "LP optimality tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps", c.eps, "Bisection bracket width")->check(CLI::Range(1e-12, 0.5));
  app.add_option("--workers", c.workers, "Worker threads (0: ROBUSTPRICE_WORKERS or hardware)")->check(CLI::NonNegativeNumber);
  app.add_option("--ratio-method", c.ratio_method, "Worst-ratio computation")->check(CLI::IsMember({"search", "direct"}));
  app.add_option("--out", c.out, "Write the result here instead of stdout");

  std::string instance, mechanism, criterion, old_c, new_c, family, grid;
  double sigma = 0.2;

  auto* solve = app.add_subcommand("solve", "Optimal robust mechanism for one criterion");
  solve->add_option("--instance", instance, "Instance document")->required();
  solve->add_option("--criterion", criterion, "revenue | regret | ratio | lambda=<x> | all")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Worst-case value and relative performance of a mechanism");
  evaluate->add_option("--instance", instance, "Instance document")->required();
  evaluate->add_option("--mechanism", mechanism, "Mechanism document")->required();
  evaluate->add_option("--criterion", criterion, "revenue | regret | ratio | lambda=<x> | all")->required();

  auto* cross = app.add_subcommand("cross", "Best performance under --new among mechanisms optimal for --old");
  cross->add_option("--instance", instance, "Instance document")->required();
  cross->add_option("--old", old_c, "revenue | regret | ratio")->required();
  cross->add_option("--new", new_c, "revenue | regret | ratio")->required();

  auto* best = app.add_subcommand("best", "Uniformly robust mechanism and its factor c*");
  best->add_option("--instance", instance, "Instance document")->required();

  auto* table = app.add_subcommand("table", "Cross-criterion table over a family (CSV)");
  table->add_option("--family", family, "mean | mean_var | median | lower_bound")->required();
  table->add_option("--grid", grid, "Parameter grid start:stop:step (default 0.1:0.9:0.1)");

  auto* theorem1 = app.add_subcommand("theorem1", "Smallest c* over a family");
  theorem1->add_option("--family", family, "mean | mean_var | median | lower_bound")->required();
  theorem1->add_option("--grid", grid, "Parameter grid start:stop:step (default 0.1:0.9:0.1)");

  auto* figure = app.add_subcommand("figure", "Relative performance of the four mechanisms across a family (CSV)");
  figure->add_option("--family", family, "mean | mean_var | median | lower_bound")->required();
  figure->add_option("--grid", grid, "Parameter grid start:stop:step (default 0.1:0.9:0.1)");
  figure->add_option("--sigma", sigma, "Standard deviation of the mean_var panel")->check(CLI::Range(1e-9, 1.0));

  auto* figure2 = app.add_subcommand("figure2", "CDFs of the four mechanisms on one instance (CSV)");
  figure2->add_option("--instance", instance, "Instance document")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(c, instance, criterion, out);
    if (evaluate->parsed()) return cmd_evaluate(c, instance, mechanism, criterion, out);
    if (cross->parsed()) return cmd_cross(c, instance, old_c, new_c, out);
    if (best->parsed()) return cmd_best(c, instance, out);
    if (table->parsed()) return cmd_table(c, family, grid, out, err);
    if (theorem1->parsed()) return cmd_theorem1(c, family, grid, out);
    if (figure->parsed()) return cmd_figure(c, family, grid, sigma, out, err);
    if (figure2->parsed()) return cmd_figure2(c, instance, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const json::exception& e) {
    err << "error (invalid_input): " << e.what() << '\n';
    return kInvalidInput;
  }
  err << "error: no subcommand\n";
  return kInvalidInput;
}

}  // namespace robustprice::cli
