#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "isodist/forest.hpp"

namespace isodist {

inline constexpr int kModelFormatVersion = 1;

// JSON document {format_version, params, n_sub, schema, trees}. Trees are
// nested node objects; reals are written with round-trip precision.
std::string model_to_json(const Forest& forest);
Forest model_from_json(const std::string& text);

void save_model(const Forest& forest, const std::filesystem::path& path);
Forest load_model(const std::filesystem::path& path);

}  // namespace isodist
