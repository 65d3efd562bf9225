// tcd: command-line front end for triggering-condition discovery.
//
// Exit status: 0 success, 2 configuration or usage error (including missing
// input files), 3 data error, 4 internal error.

#include "tcd/annotations.hpp"
#include "tcd/error.hpp"
#include "tcd/learning.hpp"
#include "tcd/model_io.hpp"
#include "tcd/pipeline.hpp"
#include "tcd/refinement.hpp"
#include "tcd/report_io.hpp"
#include "tcd/synthgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::string out;
};

// Stage defaults that --config may supply.
struct Defaults {
  std::optional<tcd::PipelineConfig> pipeline;

  tcd::AnalysisConfig analysis(const Globals& g) const {
    tcd::AnalysisConfig a = pipeline ? pipeline->analysis : tcd::AnalysisConfig{};
    if (g.alpha) a.alpha = *g.alpha;
    return a;
  }
  tcd::MatchConfig match() const { return pipeline ? pipeline->match : tcd::MatchConfig{}; }
  tcd::LearnConfig learn() const { return pipeline ? pipeline->learn : tcd::LearnConfig{}; }
  double fraction() const { return pipeline ? pipeline->train_fraction : 0.8; }
  std::vector<std::uint64_t> seeds(const Globals& g) const {
    if (g.seed) return {*g.seed};
    return pipeline ? pipeline->seeds : std::vector<std::uint64_t>{1};
  }
  std::string structure() const { return pipeline ? pipeline->structure.string() : std::string(); }
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw tcd::Error(tcd::ErrorCode::InvalidConfig, std::string("missing required option ") + flag);
}

void require_file(const std::string& path, const char* role) {
  if (!fs::is_regular_file(path)) throw tcd::Error(tcd::ErrorCode::Io, std::string(role) + " '" + path + "' does not exist");
}

void emit_json(const std::string& out, const json& doc) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    tcd::write_json_file(out, doc);
  }
}

tcd::Dataset load_dataset(const std::string& path) {
  require_file(path, "dataset");
  return tcd::dataset_from_json(tcd::read_json_file(path));
}

std::vector<tcd::RawObjectRecord> load_records(const std::string& path) {
  require_file(path, "input table");
  std::ifstream in(path);
  if (!in) throw tcd::Error(tcd::ErrorCode::Io, "cannot open '" + path + "'");
  return tcd::read_records(in);
}

std::vector<std::uint64_t> pick_seeds(const std::vector<std::uint64_t>& listed, std::size_t count, const Globals& g,
                                      const Defaults& d) {
  if (!listed.empty()) return listed;
  if (count > 0) return tcd::default_seeds(count, g.seed.value_or(1));
  return d.seeds(g);
}

tcd::NodeSpec node_spec(const std::string& name, const std::vector<std::string>& states) {
  require(name, "--node");
  return tcd::NodeSpec{name, states};
}

std::string render_or_empty(const json& doc) { return tcd::render_report(doc); }

// Prints the human summary when the JSON went to a file.
void summarize(const Globals& g, const json& doc) {
  if (!g.out.empty() && g.out != "-") std::cout << render_or_empty(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triggering-condition discovery on scene-grouped object data"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "Pipeline config (JSON); supplies defaults to every stage");
  app.add_option("--seed", g.seed, "Split or generator seed");
  app.add_option("--alpha", g.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--out", g.out, "Output file (directory for synth and run); stdout when omitted");

  Defaults d;
  std::function<int()> action;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic record table and truth sidecar");
  std::string synth_cfg;
  synth->add_option("generator", synth_cfg, "Generator config (JSON)")->required();
  synth->callback([&] {
    action = [&] {
      require_file(synth_cfg, "generator config");
      json doc = tcd::read_json_file(synth_cfg);
      if (g.seed) doc["seed"] = *g.seed;
      const fs::path base = fs::path(synth_cfg).has_parent_path() ? fs::path(synth_cfg).parent_path() : ".";
      const tcd::GeneratorConfig cfg = tcd::generator_config_from_json(doc, base);
      const tcd::GeneratedData data = tcd::generate(cfg);
      const fs::path dir = g.out.empty() ? fs::path("tcd_synth") : fs::path(g.out);
      std::ostringstream csv;
      tcd::write_records(csv, data.records);
      tcd::write_text_file(dir / "records.csv", csv.str());
      tcd::write_json_file(dir / "truth_sidecar.json", tcd::annotations_to_json(tcd::truth_sidecar(cfg, data)));
      std::cout << "scenes " << cfg.scenes << ", records " << data.records.size() << " -> " << dir.string() << '\n';
      return kOk;
    };
  });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Read a record table, check labels, write a dataset");
  std::string ingest_in, ingest_structure;
  ingest->add_option("input", ingest_in, "Record table (CSV)")->required();
  ingest->add_option("--structure", ingest_structure, "Model or structure file for label checks");
  ingest->callback([&] {
    action = [&] {
      const auto records = load_records(ingest_in);
      const std::string sp = ingest_structure.empty() ? d.structure() : ingest_structure;
      std::optional<tcd::BnStructure> structure;
      if (!sp.empty()) structure = tcd::load_structure(sp);
      const tcd::RawTable table = tcd::group_records(records, structure ? &*structure : nullptr);
      const tcd::Dataset data = tcd::dataset_from_ground_truth(table, d.match());
      emit_json(g.out, tcd::dataset_to_json(data));
      std::cerr << "records " << records.size() << ", scenes " << data.scenes.size() << ", in-range GT "
                << data.instance_count() << '\n';
      return kOk;
    };
  });

  // derive-fn
  auto* derive = app.add_subcommand("derive-fn", "Match GT to detections and label each GT object FN=Yes/No");
  std::string derive_in, derive_structure;
  bool labels_present = false;
  std::optional<double> threshold;
  derive->add_option("input", derive_in, "Record table (CSV)")->required();
  derive->add_option("--structure", derive_structure, "Model or structure file for label checks");
  derive->add_option("--threshold", threshold, "Matching cost threshold");
  derive->add_flag("--labels-present", labels_present, "GT rows already carry FN; apply the range filter only");
  derive->callback([&] {
    action = [&] {
      const auto records = load_records(derive_in);
      const std::string sp = derive_structure.empty() ? d.structure() : derive_structure;
      std::optional<tcd::BnStructure> structure;
      if (!sp.empty()) structure = tcd::load_structure(sp);
      tcd::MatchConfig mc = d.match();
      if (threshold) mc.cost_threshold = *threshold;
      mc.validate();
      const tcd::RawTable table = tcd::group_records(records, structure ? &*structure : nullptr);
      tcd::DerivationSummary s;
      const tcd::Dataset data =
          labels_present ? tcd::dataset_from_ground_truth(table, mc) : tcd::derive_dataset(table, mc, &s);
      emit_json(g.out, tcd::dataset_to_json(data));
      if (!labels_present) {
        std::cerr << "scenes " << s.scenes_out << "/" << s.scenes_in << ", instances " << s.instances << ", FN "
                  << s.false_negatives << ", FP " << s.false_positives << ", dropped GT " << s.dropped_ground_truth
                  << ", dropped det " << s.dropped_detections << '\n';
      }
      return kOk;
    };
  });

  // split
  auto* split = app.add_subcommand("split", "Scene-granular train/test split");
  std::string split_data;
  std::optional<double> split_fraction;
  split->add_option("dataset", split_data, "Dataset (JSON)")->required();
  split->add_option("--fraction", split_fraction, "Train fraction");
  split->callback([&] {
    action = [&] {
      const tcd::Dataset data = load_dataset(split_data);
      const auto a = tcd::split_scenes(data, split_fraction.value_or(d.fraction()), d.seeds(g).front());
      emit_json(g.out, tcd::split_to_json(a));
      std::cerr << "train " << a.train.size() << ", test " << a.test.size() << '\n';
      return kOk;
    };
  });

  // learn
  auto* learn = app.add_subcommand("learn", "Learn CBTs by maximum likelihood");
  std::string learn_structure, learn_data, learn_split, learn_policy;
  learn->add_option("--structure", learn_structure, "Model or structure file");
  learn->add_option("--dataset", learn_data, "Dataset (JSON)")->required();
  learn->add_option("--split", learn_split, "Split file; learn on its train side");
  learn->add_option("--policy", learn_policy, "Zero-count policy: strict or uniform");
  learn->callback([&] {
    action = [&] {
      const std::string sp = learn_structure.empty() ? d.structure() : learn_structure;
      require(sp, "--structure");
      require_file(sp, "structure");
      const tcd::BnStructure structure = tcd::load_structure(sp);
      tcd::Dataset data = load_dataset(learn_data);
      if (!learn_split.empty()) {
        require_file(learn_split, "split");
        data = tcd::apply_split(data, tcd::split_from_json(tcd::read_json_file(learn_split))).train;
      }
      tcd::LearnConfig lc = d.learn();
      if (!learn_policy.empty()) lc.zero_count_policy = tcd::parse_zero_count_policy(learn_policy);
      const tcd::BnModel model = tcd::learn_cbts(structure, data, lc);
      emit_json(g.out, tcd::model_to_json(model));
      return kOk;
    };
  });

  // test
  auto* test = app.add_subcommand("test", "Score test scenes and report relevant scenes");
  std::string test_model, test_data, test_split;
  std::vector<std::string> targets;
  std::vector<std::uint64_t> test_seeds;
  std::size_t test_splits = 0;
  std::optional<double> test_fraction;
  test->add_option("--model", test_model, "Model file; CBTs are learned when absent");
  test->add_option("--dataset", test_data, "Dataset (JSON)")->required();
  test->add_option("--split", test_split, "Split file (single run)");
  test->add_option("--target", targets, "Target node (repeatable)");
  test->add_option("--seeds", test_seeds, "Split seeds; several give a run set")->delimiter(',');
  test->add_option("--splits", test_splits, "Number of consecutive seeds starting at --seed");
  test->add_option("--fraction", test_fraction, "Train fraction");
  test->callback([&] {
    action = [&] {
      const std::string mp = test_model.empty() ? d.structure() : test_model;
      require(mp, "--model");
      require_file(mp, "model");
      const tcd::Dataset data = load_dataset(test_data);
      tcd::AnalysisConfig ac = d.analysis(g);
      if (!targets.empty()) ac.target_nodes = targets;
      ac.validate();
      const json model_doc = tcd::read_json_file(mp);
      const bool learned = tcd::json_has_cbts(model_doc);
      const tcd::BnStructure structure = tcd::structure_from_json(model_doc);

      if (!test_split.empty()) {
        require_file(test_split, "split");
        const auto a = tcd::split_from_json(tcd::read_json_file(test_split));
        const auto parts = tcd::apply_split(data, a);
        const tcd::BnModel model =
            learned ? tcd::model_from_json(model_doc) : tcd::learn_cbts(structure, parts.train, d.learn());
        tcd::RunReport run = tcd::score_scenes(model, parts.train, parts.test, ac);
        run.split_seed = a.seed;
        const json doc = tcd::run_report_to_json(run);
        emit_json(g.out, doc);
        summarize(g, doc);
        return kOk;
      }
      const auto seeds = pick_seeds(test_seeds, test_splits, g, d);
      const double fraction = test_fraction.value_or(d.fraction());
      std::vector<tcd::RunReport> runs;
      for (auto seed : seeds) {
        const auto parts = tcd::split(data, fraction, seed);
        // A stored model was fitted on one particular train side; refit per split.
        const tcd::BnModel model = tcd::learn_cbts(structure, parts.train, d.learn());
        tcd::RunReport run = tcd::score_scenes(model, parts.train, parts.test, ac);
        run.split_seed = seed;
        runs.push_back(std::move(run));
      }
      const json doc = runs.size() == 1 ? tcd::run_report_to_json(runs.front()) : tcd::run_set_to_json(runs);
      emit_json(g.out, doc);
      summarize(g, doc);
      return kOk;
    };
  });

  // export-scenes
  auto* exp = app.add_subcommand("export-scenes", "Write relevant scenes as an annotation template");
  std::string exp_report, exp_data;
  bool exp_all = false;
  exp->add_option("report", exp_report, "Run or run-set report")->required();
  exp->add_option("--dataset", exp_data, "Dataset (JSON)")->required();
  exp->add_flag("--all", exp_all, "Export every test scene, not only relevant ones");
  exp->callback([&] {
    action = [&] {
      require_file(exp_report, "report");
      const json doc = tcd::read_json_file(exp_report);
      std::vector<tcd::RunReport> runs;
      if (doc.value("kind", std::string()) == "run_set") {
        runs = tcd::run_set_from_json(doc);
      } else {
        runs.push_back(tcd::run_report_from_json(doc));
      }
      const tcd::RunReport* run = &runs.front();
      if (g.seed) {
        run = nullptr;
        for (const auto& r : runs) {
          if (r.split_seed == *g.seed) run = &r;
        }
        if (!run) throw tcd::Error(tcd::ErrorCode::InvalidConfig, "report has no run for seed " + std::to_string(*g.seed));
      }
      std::vector<std::string> ids;
      for (const auto& s : run->scenes) {
        if (exp_all || s.relevant) ids.push_back(s.scene_id);
      }
      emit_json(g.out, tcd::annotation_to_json(tcd::export_annotations(load_dataset(exp_data), ids)));
      std::cerr << "exported " << ids.size() << " scenes\n";
      return kOk;
    };
  });

  // import-annotations
  auto* imp = app.add_subcommand("import-annotations", "Add expert labels to a dataset as a new attribute");
  std::string imp_data;
  std::vector<std::string> imp_files;
  imp->add_option("--dataset", imp_data, "Dataset (JSON)")->required();
  imp->add_option("annotations", imp_files, "Annotation files")->required();
  imp->callback([&] {
    action = [&] {
      for (const auto& f : imp_files) require_file(f, "annotation file");
      tcd::Dataset data = load_dataset(imp_data);
      std::vector<tcd::Annotation> all;
      for (const auto& f : imp_files) {
        auto more = tcd::load_annotations(f);
        all.insert(all.end(), more.begin(), more.end());
      }
      data = tcd::import_annotations(all, std::move(data));
      emit_json(g.out, tcd::dataset_to_json(data));
      return kOk;
    };
  });

  // refine
  auto* refine = app.add_subcommand("refine", "Apply a structural refinement");
  std::string ref_structure, ref_op, ref_kind, ref_node, ref_parent;
  std::vector<std::string> ref_states, ref_targets;
  bool ref_prune = false;
  refine->add_option("--structure", ref_structure, "Model or structure file");
  refine->add_option("--op", ref_op, "Refinement op (JSON file)");
  refine->add_option("--kind", ref_kind, "AddDirectCause, AddConfounder or RemoveCause");
  refine->add_option("--node", ref_node, "New node name");
  refine->add_option("--states", ref_states, "New node states")->delimiter(',');
  refine->add_option("--target", ref_targets, "Target node (repeatable; the child for RemoveCause)");
  refine->add_option("--parent", ref_parent, "Parent to remove");
  refine->add_flag("--prune", ref_prune, "Drop the removed parent if left isolated");
  refine->callback([&] {
    action = [&] {
      const std::string sp = ref_structure.empty() ? d.structure() : ref_structure;
      require(sp, "--structure");
      require_file(sp, "structure");
      tcd::RefinementOp op;
      if (!ref_op.empty()) {
        require_file(ref_op, "refinement op");
        op = tcd::refinement_from_json(tcd::read_json_file(ref_op));
      } else {
        require(ref_kind, "--kind or --op");
        op.kind = tcd::parse_refinement_kind(ref_kind);
        op.targets = ref_targets;
        if (op.kind == tcd::RefinementKind::RemoveCause) {
          op.removed_parent = ref_parent;
          op.prune_orphan = ref_prune;
        } else {
          op.new_node = node_spec(ref_node, ref_states);
        }
      }
      const tcd::BnStructure refined = tcd::apply_refinement(tcd::load_structure(sp), op);
      emit_json(g.out, tcd::structure_to_json(refined));
      return kOk;
    };
  });

  // validate
  auto* val = app.add_subcommand("validate", "Compare RSS before and after a refinement");
  std::string val_before, val_after, val_data, val_eval, val_node, val_child, val_parent;
  std::vector<std::string> val_states;
  std::vector<std::uint64_t> val_seeds;
  std::size_t val_splits = 0;
  std::optional<double> val_fraction;
  val->add_option("--before", val_before, "Initial structure");
  val->add_option("--after", val_after, "Refined structure");
  val->add_option("--dataset", val_data, "Annotated dataset (JSON)")->required();
  val->add_option("--eval-node", val_eval, "Node scored for RSS");
  val->add_option("--confounder", val_node, "Confounder check: new node name (with --child, --parent)");
  val->add_option("--states", val_states, "Confounder node states")->delimiter(',');
  val->add_option("--child", val_child, "Confounder check: child");
  val->add_option("--parent", val_parent, "Confounder check: parent of the child");
  val->add_option("--seeds", val_seeds, "Split seeds")->delimiter(',');
  val->add_option("--splits", val_splits, "Number of consecutive seeds starting at --seed");
  val->add_option("--fraction", val_fraction, "Train fraction");
  val->callback([&] {
    action = [&] {
      const std::string before = val_before.empty() ? d.structure() : val_before;
      require(before, "--before");
      require_file(before, "structure");
      if (val_node.empty()) {
        require(val_after, "--after");
        require_file(val_after, "structure");
      }
      const tcd::Dataset data = load_dataset(val_data);
      const tcd::ValidationConfig vc{d.learn(), d.analysis(g).alpha};
      const auto seeds = pick_seeds(val_seeds, val_splits, g, d);
      const double fraction = val_fraction.value_or(d.fraction());
      const tcd::BnStructure b = tcd::load_structure(before);
      json doc;
      if (!val_node.empty()) {
        require(val_child, "--child");
        require(val_parent, "--parent");
        doc = tcd::confounder_report_to_json(tcd::confounder_workflow_across_splits(
            b, node_spec(val_node, val_states), val_child, val_parent, data, fraction, seeds, vc));
      } else {
        require(val_eval, "--eval-node");
        doc = tcd::validation_report_to_json(
            tcd::validate_across_splits(b, tcd::load_structure(val_after), data, fraction, seeds, vc, val_eval));
      }
      emit_json(g.out, doc);
      summarize(g, doc);
      return kOk;
    };
  });

  // report
  auto* rep = app.add_subcommand("report", "Render a report file as text");
  std::string rep_file;
  rep->add_option("report", rep_file, "Report (JSON)")->required();
  rep->callback([&] {
    action = [&] {
      require_file(rep_file, "report");
      json doc;
      try {
        doc = json::parse(tcd::read_text_file(rep_file));
      } catch (const json::parse_error& e) {
        throw tcd::Error(tcd::ErrorCode::MalformedReport, rep_file + ": " + e.what());
      }
      std::cout << tcd::render_report(doc);
      return kOk;
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run the whole pipeline from --config");
  run->callback([&] {
    action = [&] {
      require(g.config, "--config");
      tcd::PipelineConfig cfg = *d.pipeline;
      if (g.seed) cfg.seeds = {*g.seed};
      if (g.alpha) cfg.analysis.alpha = *g.alpha;
      if (!g.out.empty()) cfg.out_dir = g.out;
      const tcd::PipelineResult result = tcd::run_pipeline(cfg);
      std::cout << result.summary;
      return kOk;
    };
  });

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? kOk : kConfig;
    }
    if (!g.config.empty()) {
      if (!fs::is_regular_file(g.config)) {
        throw tcd::Error(tcd::ErrorCode::Io, "config '" + g.config + "' does not exist");
      }
      d.pipeline = tcd::load_pipeline_config(g.config);
    }
    return action ? action() : kConfig;
  } catch (const tcd::Error& e) {
    std::cerr << "tcd: " << e.what() << '\n';
    return tcd::is_config_error(e.code()) ? kConfig : kData;
  } catch (const std::exception& e) {
    std::cerr << "tcd: internal error: " << e.what() << '\n';
    return kInternal;
  }
}
