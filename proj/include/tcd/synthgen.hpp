#pragma once

#include "tcd/annotations.hpp"
#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tcd {

// Seeded synthetic scenes drawn from a ground-truth network. Scene-level
// nodes are sampled once per scene and shared by its objects; instance-level
// nodes are sampled per object. With fn_emission, FN is not written as a
// column: an object with FN = fn_positive simply gets no detection row, so
// derive_fn has to reconstruct the label.
struct GeneratorConfig {
  explicit GeneratorConfig(BnModel truth) : truth_model(std::move(truth)) {}

  BnModel truth_model;
  std::size_t scenes = 100;
  std::size_t min_instances = 20;
  std::size_t max_instances = 20;
  std::vector<std::string> scene_level_nodes;
  std::vector<std::string> instance_level_nodes;
  std::vector<std::string> hidden_nodes;
  bool fn_emission = true;
  std::string fn_node = "FN";
  std::string fn_positive = "Yes";
  double noise_std = 0.3;  // meters, per axis
  double x_limit = 140.0;
  double y_limit = 50.0;
  double min_separation = 4.0;  // meters between objects of one scene
  std::uint64_t seed = 1;
  std::string scene_prefix = "s";

  // Throws InvalidConfig.
  void validate() const;
};

struct GeneratedScene {
  std::string scene_id;
  // Full sampled assignment per object, hidden nodes included.
  std::vector<std::vector<StateId>> states;
};

struct GeneratedData {
  std::vector<RawObjectRecord> records;
  std::vector<GeneratedScene> truth;
};

GeneratedData generate(const GeneratorConfig& cfg);

// Hidden-node states in the annotation schema, one document per hidden
// node: scene-level nodes fill the scene `state`, instance-level nodes the
// per-instance `state`. Empty when nothing is hidden.
std::vector<Annotation> truth_sidecar(const GeneratorConfig& cfg, const GeneratedData& data);

// {"truth_model": "<path>" | {...model...}, "scenes": 1000,
//  "instances_per_scene": [20, 20], "scene_level_nodes": [...],
//  "instance_level_nodes": [...], "hidden_nodes": [...], "fn_emission": true,
//  "fn_node": "FN", "fn_positive": "Yes", "noise_std": 0.3, "seed": 1, ...}
// Relative model paths resolve against `base_dir`.
GeneratorConfig generator_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

}  // namespace tcd
