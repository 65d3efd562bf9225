#include "tcd/annotations.hpp"

#include "tcd/error.hpp"
#include "tcd/model_io.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace tcd {

using nlohmann::json;

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Unset: return "";
    case Verdict::RandomOccurrence: return "random_occurrence";
    case Verdict::TriggeringCondition: return "triggering_condition";
  }
  return "";
}

namespace {

Verdict parse_verdict(const std::string& text) {
  if (text.empty()) return Verdict::Unset;
  if (text == "random_occurrence") return Verdict::RandomOccurrence;
  if (text == "triggering_condition") return Verdict::TriggeringCondition;
  throw Error(ErrorCode::MalformedAnnotation,
              "verdict must be 'random_occurrence' or 'triggering_condition', got '" + text + "'");
}

void check_header(const Annotation& a) {
  if (a.node.empty()) throw Error(ErrorCode::MalformedAnnotation, "annotation declares no node name");
  if (a.states.size() < 2) {
    throw Error(ErrorCode::MalformedAnnotation, "node '" + a.node + "' needs at least 2 states");
  }
  std::set<std::string> seen(a.states.begin(), a.states.end());
  if (seen.size() != a.states.size() || seen.count("")) {
    throw Error(ErrorCode::MalformedAnnotation, "node '" + a.node + "' has duplicate or empty states");
  }
  if (a.default_state && !seen.count(*a.default_state)) {
    throw Error(ErrorCode::MalformedAnnotation, "default state '" + *a.default_state + "' is not a state of '" + a.node + "'");
  }
}

}  // namespace

Annotation export_annotations(const Dataset& data, const std::vector<std::string>& scene_ids) {
  Annotation out;
  for (const auto& id : scene_ids) {
    const SceneRecord* scene = data.find_scene(id);
    if (!scene) throw Error(ErrorCode::UnknownScene, "no scene '" + id + "' in dataset");
    AnnotatedScene rec;
    rec.scene_id = id;
    for (std::size_t i = 0; i < scene->instances.size(); ++i) {
      const auto& inst = scene->instances[i];
      rec.instances.push_back({i, inst.x, inst.y, inst.attributes, ""});
    }
    out.scenes.push_back(std::move(rec));
  }
  return out;
}

Dataset import_annotations(const Annotation& annotation, const Dataset& data) {
  check_header(annotation);
  const std::set<std::string> legal(annotation.states.begin(), annotation.states.end());
  auto check_label = [&](const std::string& label, const std::string& where) {
    if (!label.empty() && !legal.count(label)) {
      throw Error(ErrorCode::UnknownStateLabel,
                  where + ": '" + label + "' is not a state of '" + annotation.node + "'");
    }
  };

  std::unordered_map<std::string_view, const AnnotatedScene*> by_scene;
  for (const auto& s : annotation.scenes) {
    if (!data.find_scene(s.scene_id)) {
      throw Error(ErrorCode::UnknownScene, "annotation references unknown scene '" + s.scene_id + "'");
    }
    if (!by_scene.emplace(s.scene_id, &s).second) {
      throw Error(ErrorCode::MalformedAnnotation, "scene '" + s.scene_id + "' annotated twice");
    }
    check_label(s.state, "scene '" + s.scene_id + "'");
    for (const auto& i : s.instances) check_label(i.state, "scene '" + s.scene_id + "'");
  }

  Dataset out = data;
  for (auto& scene : out.scenes) {
    const AnnotatedScene* ann = nullptr;
    if (auto it = by_scene.find(scene.scene_id); it != by_scene.end()) ann = it->second;
    std::vector<std::string> per_instance(scene.instances.size());
    if (ann) {
      for (const auto& i : ann->instances) {
        if (i.index >= scene.instances.size()) {
          throw Error(ErrorCode::MalformedAnnotation, "scene '" + scene.scene_id + "' has no instance " +
                                                          std::to_string(i.index));
        }
        per_instance[i.index] = i.state;
      }
    }
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
      auto& attrs = scene.instances[i].attributes;
      if (attrs.count(annotation.node)) {
        throw Error(ErrorCode::MalformedAnnotation, "scene '" + scene.scene_id + "' already carries attribute '" +
                                                        annotation.node + "'");
      }
      std::string label = per_instance[i];
      if (label.empty() && ann) label = ann->state;
      if (label.empty() && annotation.default_state) label = *annotation.default_state;
      if (label.empty()) {
        throw Error(ErrorCode::IncompleteAnnotation, "scene '" + scene.scene_id + "' instance " +
                                                         std::to_string(i) + " has no '" + annotation.node +
                                                         "' state and no default is declared");
      }
      attrs.emplace(annotation.node, std::move(label));
    }
  }
  return out;
}

Dataset import_annotations(const std::vector<Annotation>& annotations, Dataset data) {
  for (const auto& a : annotations) data = import_annotations(a, data);
  return data;
}

json annotation_to_json(const Annotation& a) {
  json scenes = json::array();
  for (const auto& s : a.scenes) {
    json instances = json::array();
    for (const auto& i : s.instances) {
      json summary = json::object();
      for (const auto& [k, v] : i.summary) summary[k] = v;
      instances.push_back({{"index", i.index}, {"x", i.x}, {"y", i.y}, {"summary", std::move(summary)},
                           {"state", i.state}});
    }
    scenes.push_back({{"scene_id", s.scene_id},
                      {"verdict", std::string(to_string(s.verdict))},
                      {"state", s.state},
                      {"instances", std::move(instances)}});
  }
  json doc = {{"format", "tcd-annotations/1"},
              {"node", a.node},
              {"states", a.states},
              {"default_state", a.default_state ? json(*a.default_state) : json(nullptr)},
              {"scenes", std::move(scenes)}};
  return doc;
}

json annotations_to_json(const std::vector<Annotation>& annotations) {
  json list = json::array();
  for (const auto& a : annotations) list.push_back(annotation_to_json(a));
  return {{"format", "tcd-annotations/1"}, {"annotations", std::move(list)}};
}

namespace {

Annotation one_from_json(const json& doc) {
  Annotation a;
  a.node = doc.value("node", std::string());
  a.states = doc.value("states", std::vector<std::string>{});
  if (auto it = doc.find("default_state"); it != doc.end() && it->is_string() && !it->get<std::string>().empty()) {
    a.default_state = it->get<std::string>();
  }
  for (const auto& s : doc.value("scenes", json::array())) {
    AnnotatedScene scene;
    scene.scene_id = s.at("scene_id").get<std::string>();
    scene.verdict = parse_verdict(s.value("verdict", std::string()));
    scene.state = s.value("state", std::string());
    for (const auto& i : s.value("instances", json::array())) {
      AnnotatedInstance inst;
      inst.index = i.at("index").get<std::size_t>();
      inst.x = i.value("x", 0.0);
      inst.y = i.value("y", 0.0);
      const json summary = i.value("summary", json::object());
      for (const auto& [k, v] : summary.items()) inst.summary.emplace(k, v.get<std::string>());
      inst.state = i.value("state", std::string());
      scene.instances.push_back(std::move(inst));
    }
    a.scenes.push_back(std::move(scene));
  }
  return a;
}

}  // namespace

std::vector<Annotation> annotations_from_json(const json& doc) {
  std::vector<Annotation> out;
  try {
    if (doc.contains("annotations")) {
      for (const auto& a : doc["annotations"]) out.push_back(one_from_json(a));
    } else {
      out.push_back(one_from_json(doc));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedAnnotation, e.what());
  }
  return out;
}

std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedAnnotation, path.string() + ": " + e.what());
  }
  return annotations_from_json(doc);
}

}  // namespace tcd
