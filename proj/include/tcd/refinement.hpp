#pragma once

#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"
#include "tcd/hypothesis.hpp"
#include "tcd/learning.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tcd {

enum class RefinementKind { AddDirectCause, AddConfounder, RemoveCause };

std::string_view to_string(RefinementKind kind);
RefinementKind parse_refinement_kind(std::string_view text);

struct RefinementOp {
  RefinementKind kind = RefinementKind::AddDirectCause;
  std::optional<NodeSpec> new_node;  // AddDirectCause / AddConfounder
  std::vector<std::string> targets;  // one, or two distinct for AddConfounder
  std::string removed_parent;        // RemoveCause
  bool prune_orphan = false;         // RemoveCause: drop the parent if it is left isolated

  static RefinementOp direct_cause(NodeSpec node, std::string target);
  static RefinementOp confounder(NodeSpec node, std::string first, std::string second);
  static RefinementOp remove_cause(std::string parent, std::string child);
};

// New nodes enter as roots. The input is never modified. Throws
// InvalidRefinement, UnknownNode, NoSuchEdge, DuplicateNode, CyclicGraph.
BnStructure apply_refinement(const BnStructure& structure, const RefinementOp& op);

enum class Proposition { Valid, Invalid };

std::string_view to_string(Proposition p);

// valid iff rss_initial > rss_after; ties are invalid.
Proposition proposition_for(double rss_initial, double rss_after);

// 100 * (after - initial) / initial; undefined when initial == 0 unless
// both are zero (then 0).
std::optional<double> relative_rss_change(double rss_initial, double rss_after);

struct ValidationIteration {
  std::uint64_t seed = 0;
  std::size_t rss_initial = 0;
  std::size_t rss_after = 0;
  std::size_t test_scenes = 0;
  std::optional<double> relative_change;
  Proposition proposition = Proposition::Invalid;
  bool tie = false;
};

// With several splits the headline counts are per-split medians and the
// proposition follows from them.
struct ValidationReport {
  std::string node;
  double rss_initial = 0.0;
  double rss_after = 0.0;
  std::optional<double> relative_rss_change;
  Proposition proposition = Proposition::Invalid;
  bool tie = false;
  std::vector<ValidationIteration> iterations;
  std::string structure_before;  // fingerprints
  std::string structure_after;

  std::size_t valid_count() const;
};

struct ValidationConfig {
  LearnConfig learn;
  double alpha = 0.05;
};

// Learns both structures on `train`, scores `test` on `eval_node` under
// each and applies the RSS comparison. Throws MissingAttribute when the
// data lacks a new node.
ValidationReport validate(const BnStructure& before, const BnStructure& after, const Dataset& train,
                          const Dataset& test, const ValidationConfig& cfg, const std::string& eval_node,
                          std::uint64_t seed = 0);

// One split per seed (scene-granular, `train_fraction`).
ValidationReport validate_across_splits(const BnStructure& before, const BnStructure& after,
                                        const Dataset& data, double train_fraction,
                                        const std::vector<std::uint64_t>& seeds,
                                        const ValidationConfig& cfg, const std::string& eval_node);

std::vector<std::uint64_t> default_seeds(std::size_t count = 10, std::uint64_t first = 1);

struct ConfounderReport {
  std::string new_node;
  std::string child;
  std::string parent;
  ValidationReport child_report;   // new -> child, evaluated at child
  ValidationReport parent_report;  // new -> parent, evaluated at parent
  bool confounder_indicated = false;
};

// `parent` must be a parent of `child`. Indicated when both direct-cause
// refinements validate.
ConfounderReport confounder_workflow(const BnStructure& structure, const NodeSpec& new_node,
                                     const std::string& child, const std::string& parent,
                                     const Dataset& train, const Dataset& test, const ValidationConfig& cfg,
                                     std::uint64_t seed = 0);
ConfounderReport confounder_workflow_across_splits(const BnStructure& structure, const NodeSpec& new_node,
                                                   const std::string& child, const std::string& parent,
                                                   const Dataset& data, double train_fraction,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const ValidationConfig& cfg);

nlohmann::json refinement_to_json(const RefinementOp& op);
// {"kind": "AddDirectCause", "node": {"name": ..., "states": [...]},
//  "targets": [...], "removed_parent": ..., "prune_orphan": false}
RefinementOp refinement_from_json(const nlohmann::json& doc);

}  // namespace tcd
