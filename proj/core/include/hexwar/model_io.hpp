#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "hexwar/dqn.hpp"
#include "hexwar/score_model.hpp"

namespace hexwar {

inline constexpr int kModelSchemaVersion = 1;

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model files are JSON: {schema_version, kind, layer_sizes, encoder, params,
// ...kind-specific fields}. Doubles are written in shortest round-trip form,
// so load(save(m)) reproduces every parameter bit for bit.
nlohmann::json mlp_to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const DqnModel& m);
nlohmann::json model_to_json(const ScorePredictor& p);

DqnModel dqn_model_from_json(const nlohmann::json& j);
ScorePredictor score_predictor_from_json(const nlohmann::json& j);

// "dqn", "score", "manager", "multimodel", ... as declared by the document.
std::string document_kind(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hexwar
