#include "wce/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "wce/baselines.hpp"
#include "wce/collectors.hpp"
#include "wce/optimizer.hpp"
#include "wce/subproblems.hpp"

namespace wce {

using nlohmann::json;

DatasetSpec DatasetSpec::constant() { return {Kind::kConstant, "constant", 0, {}}; }
DatasetSpec DatasetSpec::intergroup(int split) { return {Kind::kIntergroup, "intergroup", split, {}}; }
DatasetSpec DatasetSpec::intragroup() { return {Kind::kIntragroup, "intragroup", 0, {}}; }
DatasetSpec DatasetSpec::worst_linf() { return {Kind::kWorstLinf, "worst_linf", 0, {}}; }
DatasetSpec DatasetSpec::worst_l2() { return {Kind::kWorstL2, "worst_l2", 0, {}}; }

DatasetSpec DatasetSpec::spatial(const std::vector<std::array<double, 2>>& points) {
  DatasetSpec spec{Kind::kSpatial, "spatial", 0, {}};
  for (const auto& p : points) spec.values.push_back(p[0] + p[1]);
  return spec;
}

DatasetSpec DatasetSpec::vector(std::string label, std::vector<double> values) {
  return {Kind::kVector, std::move(label), 0, std::move(values)};
}

double evaluate_dataset(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                        const DatasetSpec& dataset, double eps, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(dist.n());
  std::vector<double> x(n, 1.0);
  switch (dataset.kind) {
    case DatasetSpec::Kind::kConstant:
      break;
    case DatasetSpec::Kind::kIntergroup:
      for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<int>(j) < dataset.split ? 1.0 : -1.0;
      break;
    case DatasetSpec::Kind::kIntragroup:
      // +1 on odd 1-based positions, i.e. even 0-based indices.
      for (std::size_t j = 0; j < n; ++j) x[j] = j % 2 == 0 ? 1.0 : -1.0;
      break;
    case DatasetSpec::Kind::kSpatial:
    case DatasetSpec::Kind::kVector:
      x = dataset.values;
      break;
    case DatasetSpec::Kind::kWorstLinf: {
      Rng rng(seed);
      return sdp_inf_value(a, dist, eps, rng);
    }
    case DatasetSpec::Kind::kWorstL2: {
      Rng rng(seed);
      return sdp2_value(a, dist, eps, rng).value;
    }
  }
  return fixed_data_error(a, dist, x);
}

double ExperimentTable::at(const std::string& row, const std::string& column) const {
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (r == rows.end() || c == columns.end()) {
    fail(ErrorCode::kInvalidArgument, "no table cell " + row + "/" + column);
  }
  return values[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(c - columns.begin())];
}

namespace {

struct NamedEstimator {
  std::string name;
  SemilinearEstimator estimator;
};

struct Replicate {
  std::vector<std::vector<double>> values;
  json provenance;
};

int thread_cap() {
  if (const char* env = std::getenv("WCE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  return 1;
}

json optimize_into(const SampleTargetDistribution& dist, const ExperimentOptions& options,
                   NormRegime regime, std::uint64_t seed, std::vector<NamedEstimator>& out) {
  OgdConfig cfg;
  cfg.eps = options.eps;
  cfg.t_max = options.t_max;
  cfg.regime = regime;
  cfg.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  DoublingResult result = run_with_doubling(dist, cfg);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const char* name = regime == NormRegime::kL2 ? "ogd_l2" : "ogd_linf";
  out.push_back({name, std::move(result.run.estimator)});
  return {{"estimator", name},
          {"p_final", result.p_final},
          {"doublings", result.doublings},
          {"certified", result.certified},
          {"best_t", result.run.trace.best_t},
          {"best_value", result.run.trace.best_value},
          {"iterations", result.run.trace.records.size()},
          {"runtime_ms", ms}};
}

Replicate run_replicate(const ExperimentOptions& options, std::uint64_t seed,
                        std::vector<std::string>& rows_out, std::vector<std::string>& cols_out) {
  std::vector<NamedEstimator> estimators;
  std::vector<DatasetSpec> datasets;
  std::optional<SampleTargetDistribution> dist;
  json setting;

  if (options.name == "importance") {
    ImportanceOptions gen;
    gen.seed = seed;
    if (options.m) gen.m = *options.m;
    ImportanceSetting s = gen_importance(gen);
    dist = std::move(s.distribution);
    estimators.push_back({"reweighting", reweighting_estimator(*dist, s.groups)});
    estimators.push_back({"subgroup", subgroup_estimator(*dist, s.groups)});
    datasets = {DatasetSpec::constant(), DatasetSpec::intergroup(gen.split),
                DatasetSpec::intragroup()};
    setting = {{"m", gen.m}, {"n", gen.n}};
  } else if (options.name == "snowball") {
    SnowballOptions gen;
    gen.seed = seed;
    gen.shared_start = options.snowball_shared_start;
    gen.recruit_unincluded = options.snowball_recruit_unincluded;
    if (options.m) gen.m = *options.m;
    SnowballSetting s = gen_snowball(gen);
    dist = std::move(s.distribution);
    estimators.push_back({"sample_mean", sample_mean_estimator(*dist)});
    datasets = {DatasetSpec::spatial(s.points)};
    setting = {{"m", gen.m}, {"n", gen.n}, {"k", gen.k}};
  } else if (options.name == "selective") {
    SelectiveOptions gen;
    gen.overlapping = options.overlapping_windows;
    gen.clip_windows = options.clip_windows;
    SelectiveSetting s = gen_selective(gen);
    dist = std::move(s.distribution);
    estimators.push_back({"selective_prediction", selective_prediction_estimator(*dist, s.windows)});
    setting = {{"m", dist->m()}, {"n", gen.n}, {"overlapping", gen.overlapping},
               {"clip_windows", gen.clip_windows}};
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown experiment \"" + options.name + "\"");
  }
  datasets.push_back(DatasetSpec::worst_linf());
  datasets.push_back(DatasetSpec::worst_l2());

  json runs = json::array();
  runs.push_back(optimize_into(*dist, options, NormRegime::kLinf, seed, estimators));
  runs.push_back(optimize_into(*dist, options, NormRegime::kL2, seed, estimators));

  Replicate rep;
  rep.values.assign(datasets.size(), std::vector<double>(estimators.size()));
  for (std::size_t r = 0; r < datasets.size(); ++r) {
    for (std::size_t c = 0; c < estimators.size(); ++c) {
      rep.values[r][c] = evaluate_dataset(estimators[c].estimator, *dist, datasets[r], options.eps, seed);
    }
  }
  rows_out.clear();
  cols_out.clear();
  for (const auto& d : datasets) rows_out.push_back(d.label);
  for (const auto& e : estimators) cols_out.push_back(e.name);
  rep.provenance = {{"seed", seed}, {"setting", setting}, {"optimizer_runs", runs}};
  return rep;
}

}  // namespace

ExperimentTable run_experiment(const ExperimentOptions& options) {
  if (options.replicates < 1) fail(ErrorCode::kInvalidArgument, "replicates must be at least 1");
  if (!(options.eps > 0.0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (options.t_max < 1) fail(ErrorCode::kInvalidArgument, "t_max must be at least 1");

  const auto count = static_cast<std::size_t>(options.replicates);
  std::vector<Replicate> reps(count);
  std::vector<std::vector<std::string>> rows(count), cols(count);
  std::vector<std::exception_ptr> errors(count);
  const auto start = std::chrono::steady_clock::now();

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), count);
  auto work = [&](std::size_t first) {
    for (std::size_t r = first; r < count; r += workers) {
      try {
        reps[r] = run_replicate(options, options.seed + r, rows[r], cols[r]);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentTable table;
  table.rows = rows[0];
  table.columns = cols[0];
  table.values.assign(table.rows.size(), std::vector<double>(table.columns.size(), 0.0));
  json per_replicate = json::array();
  for (auto& rep : reps) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        table.values[r][c] += rep.values[r][c] / static_cast<double>(count);
      }
    }
    table.replicate_values.push_back(std::move(rep.values));
    per_replicate.push_back(std::move(rep.provenance));
  }
  table.provenance = {
      {"experiment", options.name},
      {"seed", options.seed},
      {"replicates", options.replicates},
      {"eps", options.eps},
      {"t_max", options.t_max},
      {"overlapping_windows", options.overlapping_windows},
      {"clip_windows", options.clip_windows},
      {"snowball_shared_start", options.snowball_shared_start},
      {"snowball_recruit_unincluded", options.snowball_recruit_unincluded},
      {"runs", std::move(per_replicate)},
      {"runtime_ms",
       std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
  if (options.m) table.provenance["m"] = *options.m;
  return table;
}

std::string table_to_csv(const ExperimentTable& table) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << "data_values";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.rows[r];
    for (double v : table.values[r]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

}  // namespace wce
