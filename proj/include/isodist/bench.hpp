#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isodist/csv.hpp"
#include "isodist/scenarios.hpp"

namespace isodist {

struct BenchOptions {
  // A scenario name from scenarios.hpp, or "gower" for a user-supplied CSV.
  std::string scenario = "t1";
  std::size_t rows = 1000;
  std::size_t trees = 100;
  std::size_t n_seeds = 5;
  std::uint64_t seed = 0;  // seed of the first repetition; repetition k uses seed + k
  std::size_t threads = 1;
  std::optional<std::filesystem::path> input;  // "gower" only
  CsvOptions csv;
};

struct GroupMeans {
  double within_a = 0.0;
  double within_b = 0.0;
  double between = 0.0;
};

struct RunReport {
  std::string scenario;
  BenchOptions options;
  std::vector<std::string> metrics;
  std::vector<std::uint64_t> seeds;
  // "A|B" -> mean Pearson correlation over seeds, and the per-seed values.
  std::map<std::string, double> correlations;
  std::map<std::string, std::vector<double>> correlations_per_seed;
  // t5 only: metric -> mean distances within/between the mixture groups.
  std::map<std::string, GroupMeans> group_means;
  std::map<std::string, double> timings;  // seconds per metric, summed over seeds
  std::vector<std::string> warnings;

  double correlation(const std::string& a, const std::string& b) const;
};

std::string correlation_key(const std::string& a, const std::string& b);

// Fits both forest kinds with all rows, unlimited depth and random splits,
// computes the baselines that apply to the scenario and correlates every pair
// of metrics.
RunReport run_bench(const BenchOptions& options);

// {scenario, params, seeds, correlations, correlations_per_seed, group_means?,
// timings}. Apart from "timings" the document is a pure function of the
// options.
std::string report_to_json(const RunReport& report);
std::string report_to_text(const RunReport& report);

}  // namespace isodist
