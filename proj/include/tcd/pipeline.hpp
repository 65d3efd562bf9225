#pragma once

#include "tcd/dataset.hpp"
#include "tcd/hypothesis.hpp"
#include "tcd/learning.hpp"
#include "tcd/refinement.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tcd {

struct RefinementStep {
  RefinementOp op;
  std::string eval_node;
};

struct ConfounderStep {
  NodeSpec node;
  std::string child;
  std::string parent;
};

// Full-pipeline configuration (`tcd run --config`). Paths are resolved
// against the directory of the config file.
struct PipelineConfig {
  std::filesystem::path input;              // record table
  std::optional<nlohmann::json> synth;      // generator config used instead of `input`
  std::filesystem::path structure;          // model file (CBTs ignored)
  std::vector<std::filesystem::path> annotations;
  bool labels_present = false;              // GT rows already carry FN
  std::filesystem::path out_dir = "tcd_out";
  MatchConfig match;
  LearnConfig learn;
  AnalysisConfig analysis;
  double train_fraction = 0.8;
  std::vector<std::uint64_t> seeds{1};
  std::vector<RefinementStep> refinements;
  std::vector<ConfounderStep> confounders;
  std::filesystem::path base_dir = ".";
  std::string fingerprint;  // of the source document

  // Throws InvalidConfig, or Io for a missing referenced file.
  void check() const;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

MatchConfig match_config_from_json(const nlohmann::json& doc, MatchConfig base = {});
AnalysisConfig analysis_config_from_json(const nlohmann::json& doc, AnalysisConfig base = {});

struct PipelineResult {
  std::vector<RunReport> runs;
  std::vector<ValidationReport> validations;
  std::vector<ConfounderReport> confounders;
  std::vector<std::filesystem::path> artifacts;
  std::string summary;
};

// ingest -> derive-fn -> import annotations -> per seed: split, learn,
// test -> export flagged scenes -> refinements and confounder checks.
// All artifacts land in cfg.out_dir; nothing is written if the inputs fail
// the up-front checks.
PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace tcd
