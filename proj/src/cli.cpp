#include "wce/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wce/baselines.hpp"
#include "wce/collectors.hpp"
#include "wce/experiments.hpp"
#include "wce/io.hpp"
#include "wce/lowerbound.hpp"
#include "wce/optimizer.hpp"
#include "wce/subproblems.hpp"

namespace wce::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorCode code) noexcept { return 10 + static_cast<int>(code); }

namespace {

fs::path meta_path_for(const fs::path& distribution) {
  fs::path p = distribution;
  return p.replace_extension(".meta.json");
}

json load_meta(const std::string& explicit_path, const fs::path& distribution) {
  if (!explicit_path.empty()) return io::read_json(explicit_path);
  const fs::path guess = meta_path_for(distribution);
  if (fs::exists(guess)) return io::read_json(guess);
  return json::object();
}

struct GenerateArgs {
  std::string generator;
  std::optional<int> n, m, k, split;
  std::uint64_t seed = 0;
  std::vector<int> windows;
  std::vector<double> probs;
  bool overlap = false;
  bool clip = false;
  bool shared_start = false;
  bool recruit_unincluded = false;
  std::string out;
};

int cmd_generate(const GenerateArgs& g, std::ostream& out) {
  json dist_doc, meta;
  std::size_t pairs = 0;
  if (g.generator == "importance") {
    ImportanceOptions o;
    if (g.n) o.n = *g.n;
    if (g.m) o.m = *g.m;
    o.split = g.split.value_or(o.n / 2);
    if (!g.probs.empty()) {
      if (g.probs.size() != 2) fail(ErrorCode::kInvalidArgument, "--probs takes two values");
      o.probs = {g.probs[0], g.probs[1]};
    }
    o.seed = g.seed;
    auto s = gen_importance(o);
    dist_doc = io::distribution_to_json(s.distribution);
    meta = importance_metadata(o, s.groups);
    pairs = s.distribution.m();
  } else if (g.generator == "snowball") {
    SnowballOptions o;
    if (g.n) o.n = *g.n;
    if (g.m) o.m = *g.m;
    if (g.k) o.k = *g.k;
    o.seed = g.seed;
    o.shared_start = g.shared_start;
    o.recruit_unincluded = g.recruit_unincluded;
    auto s = gen_snowball(o);
    dist_doc = io::distribution_to_json(s.distribution);
    meta = snowball_metadata(o, s.points);
    pairs = s.distribution.m();
  } else if (g.generator == "selective") {
    SelectiveOptions o;
    if (g.n) o.n = *g.n;
    if (!g.windows.empty()) o.windows = g.windows;
    o.overlapping = g.overlap;
    o.clip_windows = g.clip;
    auto s = gen_selective(o);
    dist_doc = io::distribution_to_json(s.distribution);
    meta = selective_metadata(o, s.windows);
    pairs = s.distribution.m();
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown generator \"" + g.generator + "\"");
  }
  io::write_json(g.out, dist_doc);
  io::write_json(meta_path_for(g.out), meta);
  out << g.out << ' ' << pairs << '\n';
  return kExitOk;
}

struct OptimizeArgs {
  std::string input;
  std::string regime = "l2";
  double eps = 0.01;
  int t_max = 1000;
  std::uint64_t seed = 0;
  std::optional<double> p_init;
  std::string out_prefix;
};

int cmd_optimize(const OptimizeArgs& o, std::ostream& out) {
  const SampleTargetDistribution dist = load_distribution(o.input);
  OgdConfig cfg;
  cfg.eps = o.eps;
  cfg.t_max = o.t_max;
  cfg.seed = o.seed;
  cfg.p_init = o.p_init;
  if (o.regime == "l2") {
    cfg.regime = NormRegime::kL2;
  } else if (o.regime == "linf") {
    cfg.regime = NormRegime::kLinf;
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown regime \"" + o.regime + "\"");
  }
  const DoublingResult result = run_with_doubling(dist, cfg);
  const OgdTrace& trace = result.run.trace;

  json attempts = json::array();
  for (const auto& a : result.attempts) {
    attempts.push_back({{"p", a.p},
                        {"infeasible", a.infeasible},
                        {"best_value", a.infeasible ? json(nullptr) : json(a.best_value)}});
  }
  const json summary = {{"regime", o.regime},
                        {"eps", o.eps},
                        {"t_max", o.t_max},
                        {"seed", o.seed},
                        {"best_value", trace.best_value},
                        {"best_t", trace.best_t},
                        {"iterations", trace.records.size()},
                        {"p_final", result.p_final},
                        {"doublings", result.doublings},
                        {"certified", result.certified},
                        {"radius", trace.radius},
                        {"beta", trace.beta},
                        {"theoretical_iterations", trace.theoretical_iterations},
                        {"regret_bound", trace.regret_bound},
                        {"heuristic_subproblem", trace.heuristic_subproblem},
                        {"subproblem_failures", trace.subproblem_failures},
                        {"attempts", attempts}};
  const std::string prefix = o.out_prefix;
  io::write_json(prefix + ".estimator.json", io::estimator_to_json(result.run.estimator, dist));
  io::write_text(prefix + ".trace.csv", trace_to_csv(trace));
  io::write_json(prefix + ".summary.json", summary);
  out << prefix << ".estimator.json best_value=" << trace.best_value
      << " p_final=" << result.p_final << '\n';
  return kExitOk;
}

SemilinearEstimator resolve_estimator(const std::string& spec, const SampleTargetDistribution& dist,
                                      const json& meta) {
  if (spec == "reweighting") return reweighting_estimator(dist, groups_from_metadata(meta));
  if (spec == "subgroup") return subgroup_estimator(dist, groups_from_metadata(meta));
  if (spec == "sample_mean") return sample_mean_estimator(dist);
  if (spec == "selective_prediction") {
    return selective_prediction_estimator(dist, windows_from_metadata(meta));
  }
  if (!fs::exists(spec)) {
    fail(ErrorCode::kInvalidArgument, "unknown estimator \"" + spec + "\" (not a baseline or file)");
  }
  return io::estimator_from_json(io::read_json(spec), dist);
}

DatasetSpec resolve_dataset(const std::string& spec, const SampleTargetDistribution& dist,
                            const json& meta) {
  if (spec == "constant") return DatasetSpec::constant();
  if (spec == "intergroup") {
    int split = dist.n() / 2;
    if (meta.contains("args") && meta["args"].contains("split")) split = meta["args"]["split"].get<int>();
    return DatasetSpec::intergroup(split);
  }
  if (spec == "intragroup") return DatasetSpec::intragroup();
  if (spec == "worst-linf") return DatasetSpec::worst_linf();
  if (spec == "worst-l2") return DatasetSpec::worst_l2();
  if (spec == "spatial") return DatasetSpec::spatial(points_from_metadata(meta));
  if (spec.starts_with("spatial:")) {
    return DatasetSpec::spatial(points_from_metadata(io::read_json(spec.substr(8))));
  }
  if (spec.starts_with("file:")) {
    const json doc = io::read_json(spec.substr(5));
    std::vector<double> x;
    try {
      x = doc.is_array() ? doc.get<std::vector<double>>() : doc.at("x").get<std::vector<double>>();
    } catch (const json::exception& e) {
      fail(ErrorCode::kMalformedInput, std::string("bad data file: ") + e.what());
    }
    if (x.size() != static_cast<std::size_t>(dist.n())) {
      fail(ErrorCode::kDimensionMismatch, "data file length differs from population size");
    }
    return DatasetSpec::vector(spec, std::move(x));
  }
  fail(ErrorCode::kInvalidArgument, "unknown dataset \"" + spec + "\"");
}

struct EvaluateArgs {
  std::string distribution;
  std::string meta;
  std::vector<std::string> estimators;
  std::vector<std::string> datasets;
  double eps = 0.01;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& e, std::ostream& out) {
  const SampleTargetDistribution dist = load_distribution(e.distribution);
  const json meta = load_meta(e.meta, e.distribution);
  std::vector<SemilinearEstimator> estimators;
  for (const auto& name : e.estimators) estimators.push_back(resolve_estimator(name, dist, meta));
  std::vector<DatasetSpec> datasets;
  for (const auto& name : e.datasets) datasets.push_back(resolve_dataset(name, dist, meta));

  std::ostringstream csv;
  csv.setf(std::ios::fixed);
  csv.precision(6);
  csv << "estimator,dataset,error\n";
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const double err = evaluate_dataset(estimators[i], dist, datasets[d], e.eps, e.seed);
      if (!std::isfinite(err)) fail(ErrorCode::kNonFinite, "non-finite error value");
      csv << e.estimators[i] << ',' << e.datasets[d] << ',' << err << '\n';
    }
  }
  if (e.out.empty()) {
    out << csv.str();
  } else {
    io::write_text(e.out, csv.str());
    out << e.out << '\n';
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string name;
  std::uint64_t seed = 0;
  std::optional<int> m;
  double eps = 0.01;
  int t_max = 1000;
  int replicates = 1;
  bool overlap = false;
  bool clip = false;
  bool shared_start = false;
  bool recruit_unincluded = false;
  std::string out_dir = ".";
};

int cmd_experiment(const ExperimentArgs& x, std::ostream& out) {
  ExperimentOptions options;
  options.name = x.name;
  options.seed = x.seed;
  options.m = x.m;
  options.eps = x.eps;
  options.t_max = x.t_max;
  options.replicates = x.replicates;
  options.overlapping_windows = x.overlap;
  options.clip_windows = x.clip;
  options.snowball_shared_start = x.shared_start;
  options.snowball_recruit_unincluded = x.recruit_unincluded;
  const ExperimentTable table = run_experiment(options);
  std::string stem = x.name;
  if (x.overlap) stem += "_overlap";
  if (x.clip) stem += "_clip";
  if (x.shared_start) stem += "_shared";
  if (x.recruit_unincluded) stem += "_unincluded";
  const fs::path csv = fs::path(x.out_dir) / (stem + ".csv");
  io::write_text(csv, table_to_csv(table));
  io::write_json(fs::path(x.out_dir) / (stem + ".provenance.json"), table.provenance);
  out << table_to_csv(table);
  return kExitOk;
}

struct LowerboundArgs {
  std::string distribution;
  std::string meta;
  std::optional<std::vector<int>> subset;
  std::string estimator;
  std::string out;
};

int cmd_lowerbound(const LowerboundArgs& l, std::ostream& out) {
  const SampleTargetDistribution dist = load_distribution(l.distribution);
  const NonExpansionCertificate cert =
      l.subset ? check_non_expanding(dist, *l.subset) : best_S_bruteforce(dist);
  json doc = {{"subset", cert.subset},
              {"alpha", cert.alpha},
              {"side1_count", cert.side1_count},
              {"side2_count", cert.side2_count},
              {"error_lower_bound", cert.alpha / 4.0},
              {"search", l.subset ? "given" : "exhaustive"}};
  if (!l.estimator.empty()) {
    const json meta = load_meta(l.meta, l.distribution);
    const SemilinearEstimator a = resolve_estimator(l.estimator, dist, meta);
    const Adversary adv = adversarial_values(dist, cert.subset, as_black_box(a));
    doc["adversary"] = {{"estimator", l.estimator},
                        {"x", adv.x.values()},
                        {"achieved_error", adv.achieved_error},
                        {"median", adv.median},
                        {"restricted_pairs", adv.restricted_pairs},
                        {"selected_pairs", adv.selected_pairs},
                        {"complemented", adv.complemented}};
  }
  if (l.out.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    io::write_json(l.out, doc);
    out << l.out << " alpha=" << cert.alpha << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Worst-case optimal semilinear mean estimators"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a sample-target distribution");
  generate->add_option("generator", gen.generator, "importance | snowball | selective")->required();
  generate->add_option("--n", gen.n, "Population size");
  generate->add_option("--m", gen.m, "Number of pairs");
  generate->add_option("--k", gen.k, "Snowball sample size");
  generate->add_option("--split", gen.split, "Importance group boundary");
  generate->add_option("--probs", gen.probs, "Importance inclusion probabilities")->delimiter(',');
  generate->add_option("--windows", gen.windows, "Selective window lengths")->delimiter(',');
  generate->add_flag("--overlap", gen.overlap, "Selective targets include the last sampled step");
  generate->add_flag("--clip", gen.clip, "Selective windows running past n are cut instead of dropped");
  generate->add_flag("--shared-start", gen.shared_start, "Snowball: one start vertex for all pairs");
  generate->add_flag("--recruit-unincluded", gen.recruit_unincluded,
                     "Snowball: recruit only neighbours not yet sampled");
  generate->add_option("--seed", gen.seed);
  generate->add_option("--out", gen.out, "Distribution JSON path")->required();

  OptimizeArgs opt;
  auto* optimize = app.add_subcommand("optimize", "Synthesize an estimator by online gradient descent");
  optimize->add_option("--input", opt.input, "Distribution JSON")->required();
  optimize->add_option("--regime", opt.regime, "l2 | linf");
  optimize->add_option("--eps", opt.eps);
  optimize->add_option("--t-max", opt.t_max);
  optimize->add_option("--seed", opt.seed);
  optimize->add_option("--p-init", opt.p_init, "First optimum bound of the doubling scheme");
  optimize->add_option("--out-prefix", opt.out_prefix)->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score estimators on data values");
  evaluate->add_option("--distribution", ev.distribution)->required();
  evaluate->add_option("--meta", ev.meta, "Generator metadata (default: <distribution>.meta.json)");
  evaluate->add_option("--estimator", ev.estimators, "Baseline name or estimator JSON")->required();
  evaluate->add_option("--dataset", ev.datasets,
                       "constant | intergroup | intragroup | spatial[:<meta>] | file:<path> | "
                       "worst-linf | worst-l2")
      ->required();
  evaluate->add_option("--eps", ev.eps);
  evaluate->add_option("--seed", ev.seed);
  evaluate->add_option("--out", ev.out, "CSV path (default: stdout)");

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Reproduce an experiment table");
  experiment->add_option("name", ex.name, "importance | snowball | selective")->required();
  experiment->add_option("--seed", ex.seed);
  experiment->add_option("--m", ex.m);
  experiment->add_option("--eps", ex.eps);
  experiment->add_option("--t-max", ex.t_max);
  experiment->add_option("--replicates", ex.replicates);
  experiment->add_flag("--overlap", ex.overlap);
  experiment->add_flag("--clip", ex.clip);
  experiment->add_flag("--shared-start", ex.shared_start);
  experiment->add_flag("--recruit-unincluded", ex.recruit_unincluded);
  experiment->add_option("--out-dir", ex.out_dir);

  LowerboundArgs lb;
  std::vector<int> subset;
  auto* lowerbound = app.add_subcommand("lowerbound", "Non-expansion certificate and adversary");
  lowerbound->add_option("--distribution", lb.distribution)->required();
  lowerbound->add_option("--meta", lb.meta);
  auto* subset_opt = lowerbound->add_option("--S", subset, "Comma-separated subset")->delimiter(',');
  lowerbound->add_option("--estimator", lb.estimator);
  lowerbound->add_option("--out", lb.out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out);
    if (*optimize) return cmd_optimize(opt, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*experiment) return cmd_experiment(ex, out);
    if (*lowerbound) {
      if (subset_opt->count() > 0) lb.subset = subset;
      return cmd_lowerbound(lb, out);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitUsage;
}

}  // namespace wce::cli
