#pragma once

#include "tcd/dataset.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tcd {

// Expert annotation of flagged scenes. The exported template leaves
// `node`, `states`, `verdict` and every `state` blank; an expert fills in
// what they found and the file is imported back as a new attribute.
//
//   {
//     "format": "tcd-annotations/1",
//     "node": "TrafficDensity",
//     "states": ["low", "medium", "high", "very_high"],
//     "default_state": "low",
//     "scenes": [
//       {"scene_id": "s17", "verdict": "triggering_condition", "state": "high",
//        "instances": [{"index": 0, "x": 12.5, "y": -3.0,
//                       "summary": {"FN": "Yes", ...}, "state": ""}]}
//     ]
//   }
//
// An instance-level `state` overrides the scene-level one. A file may also
// hold several documents as {"annotations": [ ... ]}.

enum class Verdict { Unset, RandomOccurrence, TriggeringCondition };

std::string_view to_string(Verdict verdict);

struct AnnotatedInstance {
  std::size_t index = 0;
  double x = 0.0;
  double y = 0.0;
  Assignment summary;
  std::string state;
};

struct AnnotatedScene {
  std::string scene_id;
  Verdict verdict = Verdict::Unset;
  std::string state;
  std::vector<AnnotatedInstance> instances;
};

struct Annotation {
  std::string node;
  std::vector<std::string> states;
  std::optional<std::string> default_state;
  std::vector<AnnotatedScene> scenes;
};

// One blank record per flagged scene. Throws UnknownScene.
Annotation export_annotations(const Dataset& data, const std::vector<std::string>& scene_ids);

// Adds `annotation.node` to every instance. Throws UnknownScene,
// IncompleteAnnotation, MalformedAnnotation.
Dataset import_annotations(const Annotation& annotation, const Dataset& data);
Dataset import_annotations(const std::vector<Annotation>& annotations, Dataset data);

nlohmann::json annotation_to_json(const Annotation& annotation);
nlohmann::json annotations_to_json(const std::vector<Annotation>& annotations);
// Accepts a single document or {"annotations": [...]}.
std::vector<Annotation> annotations_from_json(const nlohmann::json& doc);

std::vector<Annotation> load_annotations(const std::filesystem::path& path);

}  // namespace tcd
