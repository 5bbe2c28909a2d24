#include "isodist/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <system_error>

#include <CLI11.hpp>

#include "isodist/bench.hpp"
#include "isodist/csv.hpp"
#include "isodist/distance.hpp"
#include "isodist/errors.hpp"
#include "isodist/forest.hpp"
#include "isodist/matrix_io.hpp"
#include "isodist/model_io.hpp"

namespace isodist {
namespace {

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Accepts a positive integer or one of `words`; anything else is a usage error.
CLI::Validator count_or(std::vector<std::string> words) {
  return CLI::Validator(
      [words](std::string& s) -> std::string {
        if (std::find(words.begin(), words.end(), s) != words.end()) return {};
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
          return "expected a positive integer or one of the keywords, got '" + s + "'";
        }
        return {};
      },
      "N|keyword");
}

std::size_t parse_count(const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); }

struct DataFlags {
  std::string input;
  std::string missing_token = "NA";
  bool no_header = false;
  std::string schema;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--input,-i", input, "CSV file")->check(CLI::ExistingFile);
    if (required) opt->required();
    cmd->add_option("--missing-token", missing_token, "cell value treated as missing (empty cells always are)")
        ->capture_default_str();
    cmd->add_flag("--no-header", no_header, "the CSV has no header row");
    cmd->add_option("--schema", schema, "JSON object mapping column name to numeric|categorical")
        ->check(CLI::ExistingFile);
  }

  CsvOptions csv() const {
    CsvOptions o;
    o.has_header = !no_header;
    o.missing_token = missing_token;
    if (!schema.empty()) o.schema = load_schema(schema);
    return o;
  }
};

struct FitFlags {
  std::string model = "single";
  std::size_t trees = 100;
  std::size_t ndim = 1;
  std::string max_depth = "full";
  std::string subsample = "full";
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "tree kind")->check(CLI::IsMember({"single", "extended"}))->capture_default_str();
    cmd->add_option("--trees", trees, "number of trees")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
    cmd->add_option("--ndim", ndim, "variables per hyperplane (extended model)")
        ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "N, 'full' (grow until isolated) or 'auto' (ceil log2 of subsample)")
        ->check(count_or({"full", "auto"}))
        ->capture_default_str();
    cmd->add_option("--subsample", subsample, "rows per tree: N or 'full'")
        ->check(count_or({"full"}))
        ->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  }

  ForestParams params(std::size_t n_rows) const {
    ForestParams p;
    p.kind = model_kind_from_string(model);
    p.n_trees = trees;
    p.n_dims = ndim;
    p.seed = seed;
    if (subsample != "full") p.subsample = parse_count(subsample);
    if (max_depth == "auto") {
      p.max_depth = log2_depth_limit(p.subsample.value_or(n_rows));
    } else if (max_depth != "full") {
      p.max_depth = parse_count(max_depth);
    }
    return p;
  }
};

struct Prepared {
  Dataset data;
  Deduplicated dedup;
};

Prepared read_input(const DataFlags& flags, std::ostream& err) {
  Dataset ds = load_csv(flags.input, flags.csv());
  Deduplicated d = deduplicate(ds);
  if (d.had_duplicates()) {
    err << "note: " << (ds.n_rows() - d.data.n_rows()) << " duplicate row(s) collapsed; distances between "
        << "duplicates are 0\n";
  }
  return {std::move(ds), std::move(d)};
}

Forest fit_on(const Deduplicated& d, const FitFlags& flags) {
  return fit_forest(d.data, flags.params(d.data.n_rows()), flags.threads);
}

void print_summary(const Forest& forest, std::size_t rows_in, std::size_t rows_unique, std::ostream& out) {
  std::size_t min_h = std::numeric_limits<std::size_t>::max();
  std::size_t max_h = 0;
  double sum_h = 0.0;
  double sum_terminals = 0.0;
  for (const auto& tree : forest.trees) {
    const std::size_t h = tree.height();
    min_h = std::min(min_h, h);
    max_h = std::max(max_h, h);
    sum_h += static_cast<double>(h);
    sum_terminals += static_cast<double>(tree.n_terminals());
  }
  const double t = static_cast<double>(forest.trees.size());
  out << "model: " << to_string(forest.params.kind);
  if (forest.params.kind == ModelKind::extended) out << " (ndim " << forest.params.n_dims << ")";
  out << "\nrows: " << rows_in << " (" << rows_unique << " distinct), " << forest.schema.size() << " columns\n";
  out << "trees: " << forest.trees.size() << ", rows per tree: " << forest.n_sub << ", seed: " << forest.params.seed
      << '\n';
  out << "depth: min " << min_h << ", mean " << format_real(sum_h / t) << ", max " << max_h << '\n';
  out << "terminals per tree: " << format_real(sum_terminals / t) << '\n';
}

// Expands a matrix over distinct rows back to the original rows.
CondensedMatrix expand(const CondensedMatrix& unique, const Deduplicated& d) {
  const std::size_t n = d.group_map.size();
  CondensedMatrix full(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t a = d.group_map[i];
      const std::size_t b = d.group_map[j];
      full.at(i, j) = a == b ? 0.0 : unique(a, b);
    }
  }
  return full;
}

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

int cmd_fit(const DataFlags& data, const FitFlags& fit, const std::string& output, std::ostream& out,
            std::ostream& err) {
  const Prepared p = read_input(data, err);
  const Forest forest = fit_on(p.dedup, fit);
  save_model(forest, output);
  print_summary(forest, p.data.n_rows(), p.dedup.data.n_rows(), out);
  out << "wrote " << output << '\n';
  return 0;
}

Forest model_for(const Prepared& p, const std::string& model_file, bool fit_predict, const FitFlags& fit) {
  if (fit_predict) return fit_on(p.dedup, fit);
  return load_model(model_file);
}

int cmd_dist(const DataFlags& data, const FitFlags& fit, const std::string& model_file, bool fit_predict,
             const std::string& output, const std::string& format, std::ostream& out, std::ostream& err) {
  const Prepared p = read_input(data, err);
  if (p.data.n_rows() < 2) throw std::invalid_argument("distances need at least two rows");
  const Forest forest = model_for(p, model_file, fit_predict, fit);
  CondensedMatrix unique = p.dedup.data.n_rows() >= 2 ? separation_matrix_unique(forest, p.dedup.data, fit.threads)
                                                       : CondensedMatrix(1);
  const CondensedMatrix m = expand(unique, p.dedup);

  if (output.empty()) {
    if (m.size() == 2) {
      out << format_real(m(0, 1)) << '\n';
    } else if (format == "bin") {
      throw std::invalid_argument("binary output needs --output");
    } else {
      write_matrix_csv(m, out);
    }
    return 0;
  }
  auto f = open_output(output, format == "bin");
  if (format == "bin") {
    write_matrix_binary(m, f);
  } else {
    write_matrix_csv(m, f);
  }
  if (!f) throw std::runtime_error("write to '" + output + "' failed");
  err << "wrote " << m.size() << "x" << m.size() << " distance matrix to " << output << '\n';
  return 0;
}

int cmd_score(const DataFlags& data, const FitFlags& fit, const std::string& model_file, bool fit_predict,
              const std::string& output, std::ostream& out, std::ostream& err) {
  const Prepared p = read_input(data, err);
  const Forest forest = model_for(p, model_file, fit_predict, fit);
  const std::vector<double> scores = anomaly_scores(forest, p.data, fit.threads);
  std::ofstream file;
  if (!output.empty()) file = open_output(output, false);
  std::ostream& dst = output.empty() ? out : file;
  for (double s : scores) dst << format_real(s) << '\n';
  return 0;
}

int cmd_bench(BenchOptions options, const DataFlags& data, bool json, const std::string& output,
              std::ostream& out) {
  if (options.scenario == "gower") {
    if (data.input.empty()) throw CLI::RequiredError("--input (needed by --scenario gower)");
    options.input = data.input;
    options.csv = data.csv();
  }
  const RunReport report = run_bench(options);
  const std::string doc = report_to_json(report);
  if (json) {
    out << doc << '\n';
  } else {
    out << report_to_text(report);
  }
  if (!output.empty()) {
    auto f = open_output(output, false);
    f << doc << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isolation-forest separation distances"};
  app.name("isodist");
  app.require_subcommand(1);

  DataFlags data;
  FitFlags fit;
  std::string output;
  std::string model_file;
  bool fit_predict = false;
  std::string format = "csv";

  auto* fit_cmd = app.add_subcommand("fit", "fit a forest and save it as JSON");
  data.attach(fit_cmd);
  fit.attach(fit_cmd);
  fit_cmd->add_option("--output,-o", output, "model file to write")->required();

  auto add_predict = [&](CLI::App* cmd) {
    data.attach(cmd);
    fit.attach(cmd);
    auto* m = cmd->add_option("--model-file,-m", model_file, "fitted model")->check(CLI::ExistingFile);
    auto* fp = cmd->add_flag("--fit-predict", fit_predict, "fit on --input and predict in one step");
    m->excludes(fp);
    cmd->add_option("--output,-o", output, "output file (stdout when omitted)");
  };
  auto* dist_cmd = app.add_subcommand("dist", "pairwise distance matrix");
  add_predict(dist_cmd);
  dist_cmd->add_option("--format", format, "matrix format")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();

  auto* score_cmd = app.add_subcommand("score", "anomaly score per row");
  add_predict(score_cmd);

  BenchOptions bench;
  bool json = false;
  auto* bench_cmd = app.add_subcommand("bench", "correlation study on a synthetic scenario");
  bench_cmd->add_option("--scenario", bench.scenario, "t1|t2|t3|t4|t5|mixed|gower")
      ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t5", "mixed", "gower"}))
      ->capture_default_str();
  bench_cmd->add_option("--rows", bench.rows, "rows per generated dataset")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  bench_cmd->add_option("--trees", bench.trees, "trees per model")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
  bench_cmd->add_option("--seeds", bench.n_seeds, "repetitions to average")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "seed of the first repetition")->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "worker threads (0 = all cores)")->capture_default_str();
  data.attach(bench_cmd, false);
  bench_cmd->add_flag("--json", json, "print the JSON report instead of the table");
  bench_cmd->add_option("--output,-o", output, "also write the JSON report here");

  try {
    app.parse(argc, argv);
    if ((dist_cmd->parsed() || score_cmd->parsed()) && model_file.empty() && !fit_predict) {
      throw CLI::RequiredError("--model-file or --fit-predict");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(data, fit, output, out, err);
    if (dist_cmd->parsed()) return cmd_dist(data, fit, model_file, fit_predict, output, format, out, err);
    if (score_cmd->parsed()) return cmd_score(data, fit, model_file, fit_predict, output, out, err);
    return cmd_bench(bench, data, json, output, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace isodist
