#include "tcd/synthgen.hpp"

#include "tcd/error.hpp"
#include "tcd/model_io.hpp"
#include "tcd/util.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace tcd {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

}  // namespace

void GeneratorConfig::validate() const {
  const auto& s = truth_model.structure();
  if (scenes == 0) invalid("scene count must be positive");
  if (min_instances == 0 || min_instances > max_instances) invalid("instances_per_scene must be a positive range");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) invalid("noise_std must be >= 0");
  if (!(x_limit > 0.0) || !(y_limit > 0.0) || !(min_separation >= 0.0)) invalid("placement limits must be positive");

  std::set<std::string> scene_level(scene_level_nodes.begin(), scene_level_nodes.end());
  std::set<std::string> instance_level(instance_level_nodes.begin(), instance_level_nodes.end());
  if (scene_level.size() != scene_level_nodes.size() || instance_level.size() != instance_level_nodes.size()) {
    invalid("node level lists repeat a node");
  }
  for (const auto& n : scene_level) {
    if (instance_level.count(n)) invalid("node '" + n + "' is both scene-level and instance-level");
  }
  for (const auto& spec : s.nodes()) {
    if (!scene_level.count(spec.name) && !instance_level.count(spec.name)) {
      invalid("node '" + spec.name + "' is neither scene-level nor instance-level");
    }
  }
  for (const auto& n : scene_level) {
    if (!s.find(n)) invalid("scene-level node '" + n + "' is not in the truth model");
    for (const auto& p : s.parent_names(n)) {
      if (!scene_level.count(p)) invalid("scene-level node '" + n + "' has instance-level parent '" + p + "'");
    }
  }
  for (const auto& n : instance_level) {
    if (!s.find(n)) invalid("instance-level node '" + n + "' is not in the truth model");
  }
  for (const auto& h : hidden_nodes) {
    if (!s.find(h)) invalid("hidden node '" + h + "' is not in the truth model");
    if (h == fn_node) invalid("the FN node cannot be hidden");
  }
  if (fn_emission) {
    auto id = s.find(fn_node);
    if (!id) invalid("FN node '" + fn_node + "' is not in the truth model");
    if (!s.node(*id).find_state(fn_positive)) invalid("FN node has no state '" + fn_positive + "'");
    if (!instance_level.count(fn_node)) invalid("the FN node must be instance-level");
  }
  for (const auto& t : truth_model.cbts()) {
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      if (!t.has_row(r)) invalid("truth model CBT '" + t.child() + "' lacks a row; sampling needs every row");
    }
  }
}

GeneratedData generate(const GeneratorConfig& cfg) {
  cfg.validate();
  const auto& structure = cfg.truth_model.structure();
  const std::set<std::string> scene_level(cfg.scene_level_nodes.begin(), cfg.scene_level_nodes.end());
  const std::set<std::string> hidden(cfg.hidden_nodes.begin(), cfg.hidden_nodes.end());
  std::vector<NodeId> scene_order, instance_order;
  for (NodeId id : structure.topological_order()) {
    (scene_level.count(structure.node(id).name) ? scene_order : instance_order).push_back(id);
  }
  std::vector<NodeId> emitted;
  for (NodeId id = 0; id < structure.size(); ++id) {
    const auto& name = structure.node(id).name;
    if (hidden.count(name)) continue;
    if (cfg.fn_emission && name == cfg.fn_node) continue;
    emitted.push_back(id);
  }
  const auto fn_id = structure.find(cfg.fn_node);
  const StateId fn_yes =
      (cfg.fn_emission && fn_id) ? structure.node(*fn_id).state_index(cfg.fn_positive) : StateId{0};

  const std::size_t width = std::max<std::size_t>(4, std::to_string(cfg.scenes - 1).size());
  GeneratedData out;
  std::vector<StateId> codes(structure.size(), 0);
  for (std::size_t s = 0; s < cfg.scenes; ++s) {
    std::mt19937_64 rng(mix_seed(cfg.seed, s));
    std::string id = std::to_string(s);
    id = cfg.scene_prefix + std::string(width - std::min(width, id.size()), '0') + id;

    auto draw = [&](NodeId node) {
      const Cbt& t = cfg.truth_model.cbt(node);
      codes[node] = static_cast<StateId>(sample_categorical(rng, t.probabilities(t.row_of_codes(codes.data()))));
    };
    for (NodeId node : scene_order) draw(node);

    const std::size_t count =
        cfg.min_instances + static_cast<std::size_t>(uniform_index(rng, cfg.max_instances - cfg.min_instances + 1));
    GeneratedScene truth{id, {}};
    std::vector<Point> placed;
    for (std::size_t i = 0; i < count; ++i) {
      Point p;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        p.x = (2.0 * uniform01(rng) - 1.0) * cfg.x_limit * 0.999;
        p.y = (2.0 * uniform01(rng) - 1.0) * cfg.y_limit * 0.999;
        const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Point& q) {
          return std::hypot(p.x - q.x, p.y - q.y) >= cfg.min_separation;
        });
        if (clear) break;
      }
      placed.push_back(p);
      for (NodeId node : instance_order) draw(node);
      truth.states.push_back(codes);

      RawObjectRecord gt{id, Source::GroundTruth, p.x, p.y, {}};
      for (NodeId e : emitted) gt.attributes.emplace(structure.node(e).name, structure.node(e).states[codes[e]]);
      out.records.push_back(std::move(gt));
      if (cfg.fn_emission && codes[*fn_id] != fn_yes) {
        const double dx = cfg.noise_std > 0.0 ? cfg.noise_std * standard_normal(rng) : 0.0;
        const double dy = cfg.noise_std > 0.0 ? cfg.noise_std * standard_normal(rng) : 0.0;
        out.records.push_back(RawObjectRecord{id, Source::Detection, p.x + dx, p.y + dy, {}});
      }
    }
    out.truth.push_back(std::move(truth));
  }
  return out;
}

std::vector<Annotation> truth_sidecar(const GeneratorConfig& cfg, const GeneratedData& data) {
  const auto& structure = cfg.truth_model.structure();
  const std::set<std::string> scene_level(cfg.scene_level_nodes.begin(), cfg.scene_level_nodes.end());
  std::vector<Annotation> out;
  for (const auto& name : cfg.hidden_nodes) {
    const NodeId id = structure.id_of(name);
    const auto& states = structure.node(id).states;
    Annotation a;
    a.node = name;
    a.states = states;
    for (const auto& scene : data.truth) {
      AnnotatedScene rec;
      rec.scene_id = scene.scene_id;
      rec.verdict = Verdict::TriggeringCondition;
      if (scene_level.count(name)) {
        rec.state = scene.states.empty() ? states.front() : states[scene.states.front()[id]];
      } else {
        for (std::size_t i = 0; i < scene.states.size(); ++i) {
          rec.instances.push_back({i, 0.0, 0.0, {}, states[scene.states[i][id]]});
        }
      }
      a.scenes.push_back(std::move(rec));
    }
    out.push_back(std::move(a));
  }
  return out;
}

GeneratorConfig generator_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  try {
    const json& m = doc.at("truth_model");
    BnModel truth = m.is_string()
                        ? load_model(std::filesystem::path(m.get<std::string>()).is_absolute()
                                         ? std::filesystem::path(m.get<std::string>())
                                         : base_dir / m.get<std::string>())
                        : model_from_json(m);
    GeneratorConfig cfg(std::move(truth));
    cfg.scenes = doc.value("scenes", cfg.scenes);
    if (doc.contains("instances_per_scene")) {
      const auto range = doc["instances_per_scene"].get<std::vector<std::size_t>>();
      if (range.size() != 2) invalid("instances_per_scene must be [min, max]");
      cfg.min_instances = range[0];
      cfg.max_instances = range[1];
    }
    cfg.scene_level_nodes = doc.value("scene_level_nodes", cfg.scene_level_nodes);
    cfg.instance_level_nodes = doc.value("instance_level_nodes", cfg.instance_level_nodes);
    cfg.hidden_nodes = doc.value("hidden_nodes", cfg.hidden_nodes);
    cfg.fn_emission = doc.value("fn_emission", cfg.fn_emission);
    cfg.fn_node = doc.value("fn_node", cfg.fn_node);
    cfg.fn_positive = doc.value("fn_positive", cfg.fn_positive);
    cfg.noise_std = doc.value("noise_std", cfg.noise_std);
    cfg.x_limit = doc.value("x_limit", cfg.x_limit);
    cfg.y_limit = doc.value("y_limit", cfg.y_limit);
    cfg.min_separation = doc.value("min_separation", cfg.min_separation);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.scene_prefix = doc.value("scene_prefix", cfg.scene_prefix);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    invalid(std::string("generator config: ") + e.what());
  }
}

}  // namespace tcd
