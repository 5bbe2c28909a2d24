#include "isodist/bench.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "isodist/baselines.hpp"
#include "isodist/distance.hpp"
#include "isodist/forest.hpp"

namespace isodist {
namespace {

using Clock = std::chrono::steady_clock;

struct SeedResult {
  std::vector<std::pair<std::string, CondensedMatrix>> matrices;
  std::map<std::string, double> seconds;
  std::vector<std::string> warnings;

  void add(const std::string& name, const std::function<CondensedMatrix()>& compute) {
    const auto start = Clock::now();
    matrices.emplace_back(name, compute());
    seconds[name] += std::chrono::duration<double>(Clock::now() - start).count();
  }
};

CondensedMatrix forest_distances(const Dataset& ds, ModelKind kind, const BenchOptions& options,
                                 std::uint64_t seed) {
  ForestParams params;
  params.n_trees = options.trees;
  params.kind = kind;
  params.n_dims = kind == ModelKind::single ? 1 : 2;
  params.seed = seed;
  const Forest forest = fit_forest(ds, params, options.threads);
  return separation_matrix(forest, ds, options.threads);
}

void add_forests(SeedResult& result, const Dataset& ds, const BenchOptions& options,
                 std::uint64_t seed, const std::string& suffix = "") {
  result.add("Iso" + suffix, [&] { return forest_distances(ds, ModelKind::single, options, seed); });
  result.add("IsoExt" + suffix, [&] { return forest_distances(ds, ModelKind::extended, options, seed); });
}

void add_numeric_baselines(SeedResult& result, const Dataset& ds, bool with_mahalanobis,
                           const std::string& suffix = "") {
  result.add("Euc" + suffix, [&] { return euclidean_matrix(ds); });
  if (with_mahalanobis) {
    result.add("Mah" + suffix, [&] { return mahalanobis_matrix(ds, &result.warnings); });
  }
  result.add("Cos" + suffix, [&] { return cosine_distance_matrix(ds); });
}

GroupMeans group_means(const CondensedMatrix& m, const std::vector<int>& groups) {
  double sums[3] = {0, 0, 0};
  double counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const int slot = groups[i] != groups[j] ? 2 : groups[i];
      sums[slot] += m(i, j);
      counts[slot] += 1;
    }
  }
  return {sums[0] / counts[0], sums[1] / counts[1], sums[2] / counts[2]};
}

SeedResult run_one(const BenchOptions& options, const Dataset* user_data, std::uint64_t seed,
                   std::map<std::string, GroupMeans>* means) {
  SeedResult result;
  if (user_data) {
    add_forests(result, *user_data, options, seed);
    result.add("Gower", [&] { return gower_matrix(*user_data, &result.warnings); });
    return result;
  }

  const ScenarioName name = scenario_from_string(options.scenario);
  Rng rng = derive_stream(seed, 0);
  const ScenarioData data = generate_scenario(ScenarioConfig::standard(name, options.rows, seed), rng);

  switch (name) {
    case ScenarioName::t1:
      add_forests(result, data.full, options, seed);
      add_numeric_baselines(result, data.full, false);
      break;
    case ScenarioName::t2:
    case ScenarioName::t5:
      add_forests(result, data.full, options, seed);
      add_numeric_baselines(result, data.full, true);
      break;
    case ScenarioName::t3: {
      add_forests(result, data.full, options, seed);
      add_numeric_baselines(result, data.full, true);
      add_numeric_baselines(result, select_columns(data.full, {0, 1}), true, " (no x3)");
      break;
    }
    case ScenarioName::t4: {
      add_forests(result, data.full, options, seed);
      add_numeric_baselines(result, data.full, true);
      const std::string na = " (15% NA)";
      add_forests(result, *data.with_missing, options, seed, na);
      add_numeric_baselines(result, mean_impute(*data.with_missing), true, na);
      break;
    }
    case ScenarioName::mixed:
      add_forests(result, *data.with_missing, options, seed);
      result.add("Gower", [&] { return gower_matrix(*data.with_missing, &result.warnings); });
      break;
  }

  if (name == ScenarioName::t5 && means) {
    for (const auto& [metric, matrix] : result.matrices) {
      const GroupMeans gm = group_means(matrix, data.groups);
      auto& acc = (*means)[metric];
      acc.within_a += gm.within_a;
      acc.within_b += gm.within_b;
      acc.between += gm.between;
    }
  }
  return result;
}

nlohmann::json real_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string correlation_key(const std::string& a, const std::string& b) { return a + "|" + b; }

double RunReport::correlation(const std::string& a, const std::string& b) const {
  if (auto it = correlations.find(correlation_key(a, b)); it != correlations.end()) return it->second;
  if (auto it = correlations.find(correlation_key(b, a)); it != correlations.end()) return it->second;
  throw std::out_of_range("no correlation recorded for " + a + " vs " + b);
}

RunReport run_bench(const BenchOptions& options) {
  if (options.trees == 0) throw std::invalid_argument("bench: trees must be positive");
  if (options.n_seeds == 0) throw std::invalid_argument("bench: at least one seed is needed");

  std::optional<Dataset> user_data;
  if (options.scenario == "gower") {
    if (!options.input) throw std::invalid_argument("bench: scenario 'gower' needs --input");
    user_data = load_csv(*options.input, options.csv);
  } else {
    scenario_from_string(options.scenario);
  }

  RunReport report;
  report.scenario = options.scenario;
  report.options = options;
  std::map<std::string, GroupMeans> means;

  for (std::size_t k = 0; k < options.n_seeds; ++k) {
    const std::uint64_t seed = options.seed + k;
    report.seeds.push_back(seed);
    SeedResult result = run_one(options, user_data ? &*user_data : nullptr, seed, &means);
    if (report.metrics.empty()) {
      for (const auto& [name, m] : result.matrices) report.metrics.push_back(name);
    }
    for (std::size_t a = 0; a < result.matrices.size(); ++a) {
      for (std::size_t b = a + 1; b < result.matrices.size(); ++b) {
        double r = std::numeric_limits<double>::quiet_NaN();
        try {
          r = pearson_corr(result.matrices[a].second, result.matrices[b].second);
        } catch (const std::invalid_argument& e) {
          report.warnings.push_back(result.matrices[a].first + " vs " + result.matrices[b].first + ": " +
                                    e.what());
        }
        report.correlations_per_seed[correlation_key(result.matrices[a].first, result.matrices[b].first)]
            .push_back(r);
      }
    }
    for (const auto& [name, s] : result.seconds) report.timings[name] += s;
    for (auto& w : result.warnings) report.warnings.push_back(std::move(w));
  }

  for (const auto& [key, values] : report.correlations_per_seed) {
    double sum = 0.0;
    for (double v : values) sum += v;
    report.correlations[key] = sum / static_cast<double>(values.size());
  }
  const double n_seeds = static_cast<double>(options.n_seeds);
  for (auto& [metric, gm] : means) {
    report.group_means[metric] = {gm.within_a / n_seeds, gm.within_b / n_seeds, gm.between / n_seeds};
  }
  return report;
}

std::string report_to_json(const RunReport& report) {
  using nlohmann::json;
  json doc;
  doc["scenario"] = report.scenario;
  doc["params"] = {{"rows", report.options.rows},
                   {"trees", report.options.trees},
                   {"seeds", report.options.n_seeds},
                   {"base_seed", report.options.seed},
                   {"model_single", {{"n_dims", 1}}},
                   {"model_extended", {{"n_dims", 2}}},
                   {"subsample", "full"},
                   {"max_depth", "full"},
                   {"splits", "uniform_random"}};
  if (report.options.input) doc["params"]["input"] = report.options.input->string();
  doc["metrics"] = report.metrics;
  doc["seeds"] = report.seeds;
  json corr = json::object();
  for (const auto& [k, v] : report.correlations) corr[k] = real_or_null(v);
  doc["correlations"] = std::move(corr);
  json per_seed = json::object();
  for (const auto& [k, values] : report.correlations_per_seed) {
    json arr = json::array();
    for (double v : values) arr.push_back(real_or_null(v));
    per_seed[k] = std::move(arr);
  }
  doc["correlations_per_seed"] = std::move(per_seed);
  if (!report.group_means.empty()) {
    json gm = json::object();
    for (const auto& [metric, m] : report.group_means) {
      gm[metric] = {{"within_a", m.within_a}, {"within_b", m.within_b}, {"between", m.between}};
    }
    doc["group_means"] = std::move(gm);
  }
  doc["warnings"] = report.warnings;
  json timings = json::object();
  for (const auto& [k, v] : report.timings) timings[k] = v;
  doc["timings"] = std::move(timings);
  return doc.dump(2);
}

std::string report_to_text(const RunReport& report) {
  std::ostringstream out;
  out << "scenario " << report.scenario << ": " << report.options.rows << " rows, " << report.options.trees
      << " trees, " << report.seeds.size() << " seed(s)\n\n";
  std::size_t width = 8;
  for (const auto& m : report.metrics) width = std::max(width, m.size() + 2);
  out << std::setw(static_cast<int>(width)) << "";
  for (const auto& m : report.metrics) out << std::setw(static_cast<int>(width)) << m;
  out << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& row : report.metrics) {
    out << std::setw(static_cast<int>(width)) << row;
    for (const auto& col : report.metrics) {
      if (row == col) {
        out << std::setw(static_cast<int>(width)) << "";
      } else {
        out << std::setw(static_cast<int>(width)) << report.correlation(row, col);
      }
    }
    out << '\n';
  }
  if (!report.group_means.empty()) {
    out << "\nmean distance" << std::string(width > 13 ? width - 13 : 1, ' ');
    for (const auto& m : report.metrics) out << std::setw(static_cast<int>(width)) << m;
    out << '\n';
    const std::pair<const char*, double GroupMeans::*> rows[] = {
        {"within a", &GroupMeans::within_a}, {"within b", &GroupMeans::within_b}, {"between", &GroupMeans::between}};
    for (const auto& [label, field] : rows) {
      out << std::setw(static_cast<int>(width)) << label;
      for (const auto& m : report.metrics) out << std::setw(static_cast<int>(width)) << report.group_means.at(m).*field;
      out << '\n';
    }
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace isodist
