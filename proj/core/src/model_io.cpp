#include "hexwar/model_io.hpp"

#include <fstream>

namespace hexwar {

using nlohmann::json;

namespace {

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) throw ModelFormatError("model document must be a JSON object");
  if (j.value("schema_version", 0) != kModelSchemaVersion) {
    throw ModelFormatError("unsupported model schema_version");
  }
  if (j.value("kind", std::string{}) != kind) {
    throw ModelFormatError(std::string("expected a '") + kind + "' model, got '" +
                           j.value("kind", std::string{}) + "'");
  }
}

}  // namespace

json mlp_to_json(const Mlp& net) {
  return {{"layer_sizes", net.layer_sizes()}, {"params", net.flatten()}};
}

Mlp mlp_from_json(const json& j) {
  try {
    Mlp net(j.at("layer_sizes").get<std::vector<int>>());
    net.unflatten(j.at("params").get<std::vector<double>>());
    return net;
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("bad network description: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("bad network description: ") + e.what());
  }
}

json model_to_json(const DqnModel& m) {
  json j = {{"schema_version", kModelSchemaVersion},
            {"kind", "dqn"},
            {"encoder", to_json(m.encoder)}};
  j.update(mlp_to_json(m.net));
  return j;
}

json model_to_json(const ScorePredictor& p) {
  json j = {{"schema_version", kModelSchemaVersion},
            {"kind", "score"},
            {"behavior", p.behavior},
            {"adversary", p.adversary},
            {"encoder", {{"grid", p.grid}}},
            {"offset", p.offset},
            {"scale", p.scale}};
  j.update(mlp_to_json(p.net));
  return j;
}

DqnModel dqn_model_from_json(const json& j) {
  check_header(j, "dqn");
  DqnModel m;
  m.net = mlp_from_json(j);
  try {
    m.encoder = encoder_params_from_json(j.at("encoder"));
  } catch (const std::exception& e) {
    throw ModelFormatError(std::string("bad encoder block: ") + e.what());
  }
  if (static_cast<std::size_t>(m.net.input_size()) != local_length(m.encoder.radius) ||
      m.net.output_size() != kNumActions) {
    throw ModelFormatError("dqn network shape does not match its encoder");
  }
  return m;
}

ScorePredictor score_predictor_from_json(const json& j) {
  check_header(j, "score");
  ScorePredictor p;
  try {
    p.behavior = j.value("behavior", std::string{});
    p.adversary = j.value("adversary", std::string{});
    p.grid = j.at("encoder").at("grid").get<int>();
    p.offset = j.at("offset").get<double>();
    p.scale = j.at("scale").get<double>();
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("bad score model: ") + e.what());
  }
  p.net = mlp_from_json(j);
  if (p.grid < 1 || static_cast<std::size_t>(p.net.input_size()) != global_length(p.grid) ||
      p.net.output_size() != 1) {
    throw ModelFormatError("score network shape does not match its grid");
  }
  return p;
}

std::string document_kind(const json& j) {
  return j.is_object() ? j.value("kind", std::string{}) : std::string{};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
}

}  // namespace hexwar
