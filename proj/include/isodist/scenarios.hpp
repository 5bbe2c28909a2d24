#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isodist/dataset.hpp"
#include "isodist/rng.hpp"

namespace isodist {

// Synthetic comparison scenarios.
//   t1     x1, x2 ~ N(0, 1)
//   t2     x1 ~ N(0, 1), x2 ~ N(0, 100)  (variance 100)
//   t3     x1, x2 ~ N(0, 1), x3 = exp(x2)
//   t4     5-d N(mu, Sigma) with a 15% missing-cell copy
//   t5     equal-probability mixture of two correlated 2-d Gaussians
//   mixed  2 numeric + 2 categorical columns with a 10% missing-cell copy
enum class ScenarioName { t1, t2, t3, t4, t5, mixed };

const char* to_string(ScenarioName name) noexcept;
ScenarioName scenario_from_string(const std::string& name);

struct ScenarioConfig {
  ScenarioName name = ScenarioName::t1;
  std::size_t n_rows = 1000;
  std::uint64_t seed = 0;
  double missing_fraction = 0.0;  // t4: 0.15, mixed: 0.10, others 0

  static ScenarioConfig standard(ScenarioName name, std::size_t n_rows, std::uint64_t seed);
};

struct ScenarioData {
  Dataset full;
  // Copy of `full` with missing_fraction of all cells blanked (when > 0).
  std::optional<Dataset> with_missing;
  // t5 only: 0 for group a, 1 for group b.
  std::vector<int> groups;
};

ScenarioData generate_scenario(const ScenarioConfig& cfg, Rng& rng);

// Blanks exactly round(fraction * rows * cols) cells chosen uniformly.
Dataset mask_cells(const Dataset& ds, double fraction, Rng& rng);

}  // namespace isodist
