#include "isodist/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isodist/errors.hpp"

namespace isodist {
namespace {

using nlohmann::json;

json optional_to_json(const std::optional<std::size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::size_t> optional_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<std::size_t>();
}

json node_to_json(const Tree& tree, std::uint32_t idx) {
  const TreeNode& node = tree.nodes.at(idx);
  json out;
  out["n_rows"] = node.n_rows;
  out["weight"] = node.weight;
  std::visit(
      [&](const auto& rule) {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, Terminal>) {
          out["type"] = "terminal";
        } else if constexpr (std::is_same_v<T, NumericSplit>) {
          out["type"] = "numeric";
          out["var"] = rule.var;
          out["threshold"] = rule.threshold;
          out["left_fraction"] = rule.left_fraction;
        } else if constexpr (std::is_same_v<T, CategoricalSplit>) {
          out["type"] = "categorical";
          out["var"] = rule.var;
          out["left_subset"] = rule.left_subset();
          out["present"] = rule.present();
          out["left_fraction"] = rule.left_fraction;
        } else {
          out["type"] = "hyperplane";
          out["threshold"] = rule.threshold;
          json terms = json::array();
          for (const auto& term : rule.terms) {
            json t{{"var", term.var}, {"kind", to_string(term.kind)}, {"impute", term.impute}};
            if (term.kind == ColumnKind::numeric) {
              t["coef"] = term.coef;
            } else {
              json coefs = json::array();
              for (std::size_t c = 0; c < term.category_coefs.size(); ++c) {
                if (term.category_coefs[c]) coefs.push_back(json::array({c, *term.category_coefs[c]}));
              }
              t["coefs"] = std::move(coefs);
            }
            terms.push_back(std::move(t));
          }
          out["terms"] = std::move(terms);
        }
      },
      node.rule);
  if (!node.is_terminal()) {
    out["left"] = node_to_json(tree, node.left);
    out["right"] = node_to_json(tree, node.right);
  }
  return out;
}

class TreeReader {
 public:
  explicit TreeReader(const Schema& schema) : schema_(schema) {}

  Tree read(const json& root) {
    read_node(root);
    return std::move(tree_);
  }

 private:
  std::size_t checked_var(const json& j, ColumnKind expected) const {
    const auto var = j.at("var").get<std::size_t>();
    if (var >= schema_.size()) throw ModelFormatError("split variable out of range");
    if (schema_[var].kind != expected) throw ModelFormatError("split variable has the wrong kind");
    return var;
  }

  std::int32_t checked_code(const json& j, std::size_t var) const {
    const auto code = j.get<std::int64_t>();
    if (code < 0 || static_cast<std::size_t>(code) >= schema_[var].labels.size()) {
      throw ModelFormatError("category code out of range");
    }
    return static_cast<std::int32_t>(code);
  }

  std::uint32_t read_node(const json& j) {
    const auto idx = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    TreeNode node;
    node.n_rows = j.at("n_rows").get<std::uint32_t>();
    node.weight = j.at("weight").get<double>();
    const auto type = j.at("type").get<std::string>();
    if (type == "terminal") {
      node.rule = Terminal{};
    } else if (type == "numeric") {
      NumericSplit split;
      split.var = checked_var(j, ColumnKind::numeric);
      split.threshold = j.at("threshold").get<double>();
      split.left_fraction = j.at("left_fraction").get<double>();
      node.rule = split;
    } else if (type == "categorical") {
      CategoricalSplit split;
      split.var = checked_var(j, ColumnKind::categorical);
      split.left_fraction = j.at("left_fraction").get<double>();
      split.sides.assign(schema_[split.var].labels.size(), CategorySide::absent);
      for (const auto& c : j.at("present")) {
        split.sides[static_cast<std::size_t>(checked_code(c, split.var))] = CategorySide::right;
      }
      for (const auto& c : j.at("left_subset")) {
        auto& side = split.sides[static_cast<std::size_t>(checked_code(c, split.var))];
        if (side == CategorySide::absent) throw ModelFormatError("left subset not within present categories");
        side = CategorySide::left;
      }
      node.rule = std::move(split);
    } else if (type == "hyperplane") {
      HyperplaneSplit split;
      split.threshold = j.at("threshold").get<double>();
      for (const auto& t : j.at("terms")) {
        HyperplaneTerm term;
        term.kind = column_kind_from_string(t.at("kind").get<std::string>());
        term.var = checked_var(t, term.kind);
        term.impute = t.at("impute").get<double>();
        if (term.kind == ColumnKind::numeric) {
          term.coef = t.at("coef").get<double>();
        } else {
          term.category_coefs.assign(schema_[term.var].labels.size(), std::nullopt);
          for (const auto& pair : t.at("coefs")) {
            const auto code = checked_code(pair.at(0), term.var);
            term.category_coefs[static_cast<std::size_t>(code)] = pair.at(1).get<double>();
          }
        }
        split.terms.push_back(std::move(term));
      }
      if (split.terms.empty()) throw ModelFormatError("hyperplane split without terms");
      node.rule = std::move(split);
    } else {
      throw ModelFormatError("unknown node type '" + type + "'");
    }
    if (!node.is_terminal()) {
      node.left = read_node(j.at("left"));
      node.right = read_node(j.at("right"));
    }
    tree_.nodes[idx] = std::move(node);
    return idx;
  }

  const Schema& schema_;
  Tree tree_;
};

}  // namespace

std::string model_to_json(const Forest& forest) {
  const auto& p = forest.params;
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["params"] = {
      {"n_trees", p.n_trees},
      {"subsample", optional_to_json(p.subsample)},
      {"n_dims", p.n_dims},
      {"max_depth", optional_to_json(p.max_depth)},
      {"seed", p.seed},
      {"model_kind", to_string(p.kind)},
      {"split_chooser", "uniform_random"},
  };
  doc["n_sub"] = forest.n_sub;
  json schema = json::array();
  for (const auto& col : forest.schema) {
    json c{{"name", col.name}, {"kind", to_string(col.kind)}};
    if (col.kind == ColumnKind::categorical) c["labels"] = col.labels;
    schema.push_back(std::move(c));
  }
  doc["schema"] = std::move(schema);
  json trees = json::array();
  for (const auto& tree : forest.trees) trees.push_back(node_to_json(tree, 0));
  doc["trees"] = std::move(trees);
  return doc.dump();
}

Forest model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelFormatError("unsupported model format version " + std::to_string(version));
    }
    Forest forest;
    const auto& p = doc.at("params");
    forest.params.n_trees = p.at("n_trees").get<std::size_t>();
    forest.params.subsample = optional_from_json(p.at("subsample"));
    forest.params.n_dims = p.at("n_dims").get<std::size_t>();
    forest.params.max_depth = optional_from_json(p.at("max_depth"));
    forest.params.seed = p.at("seed").get<std::uint64_t>();
    forest.params.kind = model_kind_from_string(p.at("model_kind").get<std::string>());
    if (p.at("split_chooser").get<std::string>() != "uniform_random") {
      throw ModelFormatError("unsupported split chooser");
    }
    forest.n_sub = doc.at("n_sub").get<std::size_t>();
    for (const auto& c : doc.at("schema")) {
      ColumnSchema col;
      col.name = c.at("name").get<std::string>();
      col.kind = column_kind_from_string(c.at("kind").get<std::string>());
      if (col.kind == ColumnKind::categorical) col.labels = c.at("labels").get<std::vector<std::string>>();
      forest.schema.push_back(std::move(col));
    }
    for (const auto& t : doc.at("trees")) forest.trees.push_back(TreeReader(forest.schema).read(t));
    if (forest.trees.size() != forest.params.n_trees) {
      throw ModelFormatError("tree count does not match parameters");
    }
    return forest;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Forest& forest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << model_to_json(forest) << '\n';
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Forest load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace isodist
