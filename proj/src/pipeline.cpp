#include "tcd/pipeline.hpp"

#include "tcd/annotations.hpp"
#include "tcd/error.hpp"
#include "tcd/model_io.hpp"
#include "tcd/report_io.hpp"
#include "tcd/synthgen.hpp"
#include "tcd/util.hpp"

#include <fstream>
#include <sstream>

namespace tcd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p, const char* role) {
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::Io, std::string(role) + " '" + p.string() + "' does not exist");
}

}  // namespace

MatchConfig match_config_from_json(const json& doc, MatchConfig base) {
  base.cost_threshold = doc.value("cost_threshold", base.cost_threshold);
  base.x_limit = doc.value("x_limit", base.x_limit);
  base.y_limit = doc.value("y_limit", base.y_limit);
  base.fn_node = doc.value("fn_node", base.fn_node);
  base.fn_positive = doc.value("fn_positive", base.fn_positive);
  base.fn_negative = doc.value("fn_negative", base.fn_negative);
  return base;
}

AnalysisConfig analysis_config_from_json(const json& doc, AnalysisConfig base) {
  base.alpha = doc.value("alpha", base.alpha);
  base.target_nodes = doc.value("target_nodes", base.target_nodes);
  return base;
}

PipelineConfig pipeline_config_from_json(const json& doc, const fs::path& base_dir) {
  PipelineConfig cfg;
  cfg.base_dir = base_dir;
  cfg.fingerprint = hex64(fnv1a64(doc.dump()));
  try {
    if (doc.contains("input")) cfg.input = resolve(base_dir, doc["input"].get<std::string>());
    if (doc.contains("synth")) cfg.synth = doc["synth"];
    cfg.structure = resolve(base_dir, doc.at("structure").get<std::string>());
    for (const auto& a : doc.value("annotations", std::vector<std::string>{})) {
      cfg.annotations.push_back(resolve(base_dir, a));
    }
    cfg.labels_present = doc.value("labels_present", false);
    if (doc.contains("out")) cfg.out_dir = resolve(base_dir, doc["out"].get<std::string>());
    if (doc.contains("match")) cfg.match = match_config_from_json(doc["match"]);
    if (doc.contains("learn")) {
      cfg.learn.zero_count_policy =
          parse_zero_count_policy(doc["learn"].value("zero_count_policy", std::string("uniform")));
    }
    if (doc.contains("analysis")) cfg.analysis = analysis_config_from_json(doc["analysis"]);
    if (doc.contains("split")) {
      cfg.train_fraction = doc["split"].value("fraction", cfg.train_fraction);
      cfg.seeds = doc["split"].value("seeds", cfg.seeds);
    }
    for (const auto& r : doc.value("refinements", json::array())) {
      RefinementStep step{refinement_from_json(r.at("op")), r.value("eval_node", std::string())};
      if (step.eval_node.empty()) {
        if (step.op.targets.empty()) invalid("refinement needs an eval_node");
        step.eval_node = step.op.targets.front();
      }
      cfg.refinements.push_back(std::move(step));
    }
    for (const auto& c : doc.value("confounders", json::array())) {
      cfg.confounders.push_back({NodeSpec{c.at("node").at("name").get<std::string>(),
                                          c.at("node").at("states").get<std::vector<std::string>>()},
                                 c.at("child").get<std::string>(), c.at("parent").get<std::string>()});
    }
  } catch (const json::exception& e) {
    invalid(std::string("pipeline config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    invalid(path.string() + ": " + e.what());
  }
  return pipeline_config_from_json(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void PipelineConfig::check() const {
  if (synth) {
    if (synth->contains("truth_model") && (*synth)["truth_model"].is_string()) {
      require_file(resolve(base_dir, (*synth)["truth_model"].get<std::string>()), "truth model");
    }
  } else {
    if (input.empty()) invalid("config names neither 'input' nor 'synth'");
    require_file(input, "input table");
  }
  require_file(structure, "structure");
  for (const auto& a : annotations) require_file(a, "annotation file");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) invalid("split fraction must lie strictly between 0 and 1");
  if (seeds.empty()) invalid("at least one split seed is required");
  analysis.validate();
  match.validate();
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.check();
  const BnStructure structure = load_structure(cfg.structure);
  for (const auto& t : cfg.analysis.target_nodes) structure.id_of(t);

  PipelineResult result;
  std::ostringstream summary;
  auto emit = [&](const fs::path& name, const std::string& text) {
    const fs::path p = cfg.out_dir / name;
    write_text_file(p, text);
    result.artifacts.push_back(p);
  };

  // Everything that can fail on input content happens before the first write.
  std::vector<RawObjectRecord> records;
  std::vector<Annotation> annotations;
  std::optional<GeneratedData> generated;
  if (cfg.synth) {
    const GeneratorConfig gen_cfg = generator_config_from_json(*cfg.synth, cfg.base_dir);
    generated = generate(gen_cfg);
    records = generated->records;
    if (cfg.synth->value("use_truth_sidecar", false)) annotations = truth_sidecar(gen_cfg, *generated);
  } else {
    std::ifstream in(cfg.input);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + cfg.input.string() + "'");
    records = read_records(in);
  }
  for (const auto& path : cfg.annotations) {
    auto more = load_annotations(path);
    annotations.insert(annotations.end(), more.begin(), more.end());
  }
  const RawTable table = group_records(records, &structure);
  DerivationSummary derivation;
  Dataset data = cfg.labels_present ? dataset_from_ground_truth(table, cfg.match)
                                    : derive_dataset(table, cfg.match, &derivation);
  data = import_annotations(annotations, std::move(data));
  check_observed(data, structure);

  std::vector<BnStructure> refined;
  for (const auto& step : cfg.refinements) refined.push_back(apply_refinement(structure, step.op));

  if (cfg.synth) {
    std::ostringstream csv;
    write_records(csv, records);
    emit("records.csv", csv.str());
  }
  emit("dataset.json", dataset_to_json(data).dump(2) + "\n");
  summary << "scenes " << data.scenes.size() << ", instances " << data.instance_count();
  if (!cfg.labels_present) {
    summary << ", FN " << derivation.false_negatives << ", FP " << derivation.false_positives
            << ", dropped GT " << derivation.dropped_ground_truth;
  }
  summary << '\n';

  for (auto seed : cfg.seeds) {
    const SplitAssignment assignment = split_scenes(data, cfg.train_fraction, seed);
    const SplitResult parts = apply_split(data, assignment);
    emit("split_" + std::to_string(seed) + ".json", split_to_json(assignment).dump(2) + "\n");
    const BnModel model = learn_cbts(structure, parts.train, cfg.learn);
    emit("model_" + std::to_string(seed) + ".model", model_to_json(model).dump(2) + "\n");
    RunReport run = score_scenes(model, parts.train, parts.test, cfg.analysis);
    run.split_seed = seed;
    result.runs.push_back(std::move(run));
  }
  const json run_set = run_set_to_json(result.runs);
  emit("run_report.json", run_set.dump(2) + "\n");
  summary << render_report(run_set);

  std::vector<std::string> flagged;
  for (const auto& s : result.runs.front().scenes) {
    if (s.relevant) flagged.push_back(s.scene_id);
  }
  emit("flagged_scenes.json", annotation_to_json(export_annotations(data, flagged)).dump(2) + "\n");

  const ValidationConfig vcfg{cfg.learn, cfg.analysis.alpha};
  for (std::size_t i = 0; i < cfg.refinements.size(); ++i) {
    const auto& step = cfg.refinements[i];
    emit("refined_" + std::to_string(i) + ".model", structure_to_json(refined[i]).dump(2) + "\n");
    ValidationReport v =
        validate_across_splits(structure, refined[i], data, cfg.train_fraction, cfg.seeds, vcfg, step.eval_node);
    emit("validation_" + std::to_string(i) + ".json", validation_report_to_json(v).dump(2) + "\n");
    summary << "refinement " << i << " (" << to_string(step.op.kind) << ")\n" << render_validation_summary(v);
    result.validations.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < cfg.confounders.size(); ++i) {
    const auto& c = cfg.confounders[i];
    ConfounderReport r = confounder_workflow_across_splits(structure, c.node, c.child, c.parent, data,
                                                           cfg.train_fraction, cfg.seeds, vcfg);
    emit("confounder_" + std::to_string(i) + ".json", confounder_report_to_json(r).dump(2) + "\n");
    summary << render_confounder_summary(r);
    result.confounders.push_back(std::move(r));
  }

  json provenance = {{"config_fingerprint", cfg.fingerprint},
                     {"structure_fingerprint", structure_fingerprint(structure)},
                     {"seeds", cfg.seeds},
                     {"train_fraction", cfg.train_fraction},
                     {"alpha", cfg.analysis.alpha},
                     {"target_nodes", cfg.analysis.target_nodes}};
  emit("provenance.json", provenance.dump(2) + "\n");
  result.summary = summary.str();
  emit("summary.txt", result.summary);
  return result;
}

}  // namespace tcd
