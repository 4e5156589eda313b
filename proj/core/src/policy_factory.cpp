#include "hexwar/policy_factory.hpp"

#include "hexwar/behaviors.hpp"
#include "hexwar/model_io.hpp"

namespace hexwar {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& ref) {
  fs::path p(ref);
  return p.is_absolute() || base.empty() ? p : base / p;
}

PolicyPtr make_policy_at(std::string_view spec, Faction faction, const fs::path& base) {
  if (auto p = make_behavior(spec)) return p;
  if (spec == "hierarchy") return std::make_unique<HierarchicalPolicy>();
  const fs::path path = resolve(base, std::string(spec));
  if (!fs::exists(path)) {
    throw PolicySpecError("unknown policy '" + std::string(spec) +
                          "': not a behavior name and no such file");
  }
  nlohmann::json doc;
  try {
    doc = read_json_file(path);
  } catch (const std::exception& e) {
    throw PolicySpecError("policy file " + path.string() + ": " + e.what());
  }
  const std::string kind = document_kind(doc);
  try {
    if (kind == "dqn") {
      return std::make_unique<DqnPolicy>(dqn_model_from_json(doc), path.stem().string());
    }
    if (kind == "manager") {
      auto h = std::make_unique<HierarchicalPolicy>();
      h->set_manager_model(manager_model_from_json(doc));
      return h;
    }
    if (kind == "multimodel") {
      auto m = load_multimodel(path);
      if (m->faction() != faction) {
        throw PolicySpecError("multi-model manifest " + path.string() + " controls " +
                              std::string(to_string(m->faction())) + ", requested for " +
                              std::string(to_string(faction)));
      }
      return m;
    }
  } catch (const ModelFormatError& e) {
    throw PolicySpecError(path.string() + ": " + e.what());
  }
  throw PolicySpecError(path.string() + ": unsupported document kind '" + kind + "'");
}

}  // namespace

PolicyPtr make_policy(std::string_view spec, Faction faction) {
  return make_policy_at(spec, faction, {});
}

std::unique_ptr<MultiModel> load_multimodel(const fs::path& manifest) {
  nlohmann::json doc;
  try {
    doc = read_json_file(manifest);
  } catch (const std::exception& e) {
    throw PolicySpecError("multi-model manifest: " + std::string(e.what()));
  }
  if (document_kind(doc) != "multimodel") {
    throw PolicySpecError(manifest.string() + ": not a multi-model manifest");
  }
  const auto faction = faction_from_string(doc.value("faction", std::string("blue")));
  if (!faction) throw PolicySpecError(manifest.string() + ": bad faction");
  const fs::path base = manifest.parent_path();
  if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty()) {
    throw PolicySpecError(manifest.string() + ": 'models' must be a non-empty array");
  }
  std::vector<RepositoryEntry> repo;
  for (const auto& entry : doc["models"]) {
    if (!entry.contains("behavior") || !entry.contains("predictor")) {
      throw PolicySpecError(manifest.string() + ": each model needs 'behavior' and 'predictor'");
    }
    RepositoryEntry e;
    e.behavior = make_policy_at(entry["behavior"].get<std::string>(), *faction, base);
    const fs::path pred = resolve(base, entry["predictor"].get<std::string>());
    try {
      e.predictor = score_predictor_from_json(read_json_file(pred));
    } catch (const std::exception& ex) {
      throw PolicySpecError("predictor " + pred.string() + ": " + ex.what());
    }
    if (entry.contains("adversary")) e.predictor.adversary = entry["adversary"].get<std::string>();
    repo.push_back(std::move(e));
  }
  return std::make_unique<MultiModel>(*faction, std::move(repo));
}

}  // namespace hexwar
