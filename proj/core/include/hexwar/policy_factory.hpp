#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hexwar/episode.hpp"
#include "hexwar/hierarchy.hpp"
#include "hexwar/multimodel.hpp"

namespace hexwar {

class PolicySpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resolves a policy spec: a scripted behavior name (pass, random, greedy,
// hold, goal), "hierarchy", or a path to a JSON document whose "kind" is
// "dqn", "manager" (hierarchy with learned managers) or "multimodel".
// Relative paths inside manifests resolve against the manifest's directory.
// Throws PolicySpecError when the spec cannot be resolved.
PolicyPtr make_policy(std::string_view spec, Faction faction);

// Multi-model manifest:
//   {"kind": "multimodel", "faction": "blue",
//    "models": [{"behavior": <spec>, "predictor": <score model path>,
//                "adversary": <name>}, ...]}
std::unique_ptr<MultiModel> load_multimodel(const std::filesystem::path& manifest);

}  // namespace hexwar
