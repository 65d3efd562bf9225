#include "tcd/refinement.hpp"

#include "tcd/error.hpp"
#include "tcd/model_io.hpp"
#include "tcd/util.hpp"

#include <algorithm>

namespace tcd {

using nlohmann::json;

std::string_view to_string(RefinementKind kind) {
  switch (kind) {
    case RefinementKind::AddDirectCause: return "AddDirectCause";
    case RefinementKind::AddConfounder: return "AddConfounder";
    case RefinementKind::RemoveCause: return "RemoveCause";
  }
  return "";
}

RefinementKind parse_refinement_kind(std::string_view text) {
  if (text == "AddDirectCause") return RefinementKind::AddDirectCause;
  if (text == "AddConfounder") return RefinementKind::AddConfounder;
  if (text == "RemoveCause") return RefinementKind::RemoveCause;
  throw Error(ErrorCode::InvalidRefinement, "unknown refinement kind '" + std::string(text) + "'");
}

RefinementOp RefinementOp::direct_cause(NodeSpec node, std::string target) {
  RefinementOp op;
  op.kind = RefinementKind::AddDirectCause;
  op.new_node = std::move(node);
  op.targets = {std::move(target)};
  return op;
}

RefinementOp RefinementOp::confounder(NodeSpec node, std::string first, std::string second) {
  RefinementOp op;
  op.kind = RefinementKind::AddConfounder;
  op.new_node = std::move(node);
  op.targets = {std::move(first), std::move(second)};
  return op;
}

RefinementOp RefinementOp::remove_cause(std::string parent, std::string child) {
  RefinementOp op;
  op.kind = RefinementKind::RemoveCause;
  op.removed_parent = std::move(parent);
  op.targets = {std::move(child)};
  return op;
}

BnStructure apply_refinement(const BnStructure& structure, const RefinementOp& op) {
  std::vector<NodeSpec> nodes = structure.nodes();
  std::vector<Edge> edges = structure.edges();
  switch (op.kind) {
    case RefinementKind::AddDirectCause:
    case RefinementKind::AddConfounder: {
      const std::size_t want = op.kind == RefinementKind::AddDirectCause ? 1 : 2;
      if (!op.new_node) throw Error(ErrorCode::InvalidRefinement, std::string(to_string(op.kind)) + " needs a new node");
      if (op.targets.size() != want) {
        throw Error(ErrorCode::InvalidRefinement,
                    std::string(to_string(op.kind)) + " takes exactly " + std::to_string(want) + " target(s)");
      }
      if (want == 2 && op.targets[0] == op.targets[1]) {
        throw Error(ErrorCode::InvalidRefinement, "confounder targets must be distinct");
      }
      for (const auto& t : op.targets) structure.id_of(t);
      nodes.push_back(*op.new_node);
      for (const auto& t : op.targets) edges.emplace_back(op.new_node->name, t);
      break;
    }
    case RefinementKind::RemoveCause: {
      if (op.targets.size() != 1 || op.removed_parent.empty()) {
        throw Error(ErrorCode::InvalidRefinement, "RemoveCause takes one child and the parent to remove");
      }
      const auto& child = op.targets[0];
      structure.id_of(child);
      const NodeId parent_id = structure.id_of(op.removed_parent);
      auto it = std::find(edges.begin(), edges.end(), Edge{op.removed_parent, child});
      if (it == edges.end()) {
        throw Error(ErrorCode::NoSuchEdge, "no edge " + op.removed_parent + " -> " + child);
      }
      edges.erase(it);
      const bool isolated = structure.parents(parent_id).empty() && structure.children(parent_id).size() == 1;
      if (op.prune_orphan && isolated) {
        nodes.erase(std::find_if(nodes.begin(), nodes.end(),
                                 [&](const NodeSpec& n) { return n.name == op.removed_parent; }));
      }
      break;
    }
  }
  return build_structure(std::move(nodes), std::move(edges));
}

std::string_view to_string(Proposition p) { return p == Proposition::Valid ? "valid" : "invalid"; }

Proposition proposition_for(double rss_initial, double rss_after) {
  return rss_initial > rss_after ? Proposition::Valid : Proposition::Invalid;
}

std::optional<double> relative_rss_change(double rss_initial, double rss_after) {
  if (rss_initial == 0.0) {
    if (rss_after == 0.0) return 0.0;
    return std::nullopt;
  }
  return 100.0 * (rss_after - rss_initial) / rss_initial;
}

std::size_t ValidationReport::valid_count() const {
  return static_cast<std::size_t>(std::count_if(iterations.begin(), iterations.end(), [](const auto& it) {
    return it.proposition == Proposition::Valid;
  }));
}

namespace {

ValidationIteration run_iteration(const BnStructure& before, const BnStructure& after, const Dataset& train,
                                  const Dataset& test, const ValidationConfig& cfg, const std::string& eval_node,
                                  std::uint64_t seed) {
  if (!before.find(eval_node) || !after.find(eval_node)) {
    throw Error(ErrorCode::UnknownNode, "evaluation node '" + eval_node + "' must exist in both structures");
  }
  AnalysisConfig analysis{cfg.alpha, {eval_node}};
  const BnModel initial = learn_cbts(before, train, cfg.learn);
  const BnModel refined = learn_cbts(after, train, cfg.learn);
  const RunReport r0 = score_scenes(initial, train, test, analysis);
  const RunReport r1 = score_scenes(refined, train, test, analysis);
  ValidationIteration it;
  it.seed = seed;
  it.rss_initial = r0.rss;
  it.rss_after = r1.rss;
  it.test_scenes = test.scenes.size();
  it.relative_change = relative_rss_change(static_cast<double>(r0.rss), static_cast<double>(r1.rss));
  it.proposition = proposition_for(static_cast<double>(r0.rss), static_cast<double>(r1.rss));
  it.tie = r0.rss == r1.rss;
  return it;
}

ValidationReport summarize(const BnStructure& before, const BnStructure& after, const std::string& eval_node,
                           std::vector<ValidationIteration> iterations) {
  ValidationReport rep;
  rep.node = eval_node;
  std::vector<double> initial, refined;
  for (const auto& it : iterations) {
    initial.push_back(static_cast<double>(it.rss_initial));
    refined.push_back(static_cast<double>(it.rss_after));
  }
  rep.rss_initial = median(initial);
  rep.rss_after = median(refined);
  rep.relative_rss_change = relative_rss_change(rep.rss_initial, rep.rss_after);
  rep.proposition = proposition_for(rep.rss_initial, rep.rss_after);
  rep.tie = rep.rss_initial == rep.rss_after;
  rep.iterations = std::move(iterations);
  rep.structure_before = structure_fingerprint(before);
  rep.structure_after = structure_fingerprint(after);
  return rep;
}

}  // namespace

ValidationReport validate(const BnStructure& before, const BnStructure& after, const Dataset& train,
                          const Dataset& test, const ValidationConfig& cfg, const std::string& eval_node,
                          std::uint64_t seed) {
  return summarize(before, after, eval_node, {run_iteration(before, after, train, test, cfg, eval_node, seed)});
}

ValidationReport validate_across_splits(const BnStructure& before, const BnStructure& after, const Dataset& data,
                                        double train_fraction, const std::vector<std::uint64_t>& seeds,
                                        const ValidationConfig& cfg, const std::string& eval_node) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "validation needs at least one seed");
  std::vector<ValidationIteration> iterations;
  for (auto seed : seeds) {
    const SplitResult parts = split(data, train_fraction, seed);
    iterations.push_back(run_iteration(before, after, parts.train, parts.test, cfg, eval_node, seed));
  }
  return summarize(before, after, eval_node, std::move(iterations));
}

std::vector<std::uint64_t> default_seeds(std::size_t count, std::uint64_t first) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(first + i);
  return out;
}

namespace {

void check_confounder_args(const BnStructure& structure, const NodeSpec& new_node, const std::string& child,
                           const std::string& parent) {
  if (!structure.has_edge(parent, child)) {
    throw Error(ErrorCode::NoSuchEdge, "'" + parent + "' is not a parent of '" + child + "'");
  }
  if (structure.find(new_node.name)) {
    throw Error(ErrorCode::DuplicateNode, "node '" + new_node.name + "' already exists");
  }
}

}  // namespace

ConfounderReport confounder_workflow(const BnStructure& structure, const NodeSpec& new_node, const std::string& child,
                                     const std::string& parent, const Dataset& train, const Dataset& test,
                                     const ValidationConfig& cfg, std::uint64_t seed) {
  check_confounder_args(structure, new_node, child, parent);
  ConfounderReport rep{new_node.name, child, parent, {}, {}, false};
  const auto to_child = apply_refinement(structure, RefinementOp::direct_cause(new_node, child));
  const auto to_parent = apply_refinement(structure, RefinementOp::direct_cause(new_node, parent));
  rep.child_report = validate(structure, to_child, train, test, cfg, child, seed);
  rep.parent_report = validate(structure, to_parent, train, test, cfg, parent, seed);
  rep.confounder_indicated = rep.child_report.proposition == Proposition::Valid &&
                             rep.parent_report.proposition == Proposition::Valid;
  return rep;
}

ConfounderReport confounder_workflow_across_splits(const BnStructure& structure, const NodeSpec& new_node,
                                                   const std::string& child, const std::string& parent,
                                                   const Dataset& data, double train_fraction,
                                                   const std::vector<std::uint64_t>& seeds,
                                                   const ValidationConfig& cfg) {
  check_confounder_args(structure, new_node, child, parent);
  ConfounderReport rep{new_node.name, child, parent, {}, {}, false};
  const auto to_child = apply_refinement(structure, RefinementOp::direct_cause(new_node, child));
  const auto to_parent = apply_refinement(structure, RefinementOp::direct_cause(new_node, parent));
  rep.child_report = validate_across_splits(structure, to_child, data, train_fraction, seeds, cfg, child);
  rep.parent_report = validate_across_splits(structure, to_parent, data, train_fraction, seeds, cfg, parent);
  rep.confounder_indicated = rep.child_report.proposition == Proposition::Valid &&
                             rep.parent_report.proposition == Proposition::Valid;
  return rep;
}

json refinement_to_json(const RefinementOp& op) {
  json doc = {{"kind", std::string(to_string(op.kind))}, {"targets", op.targets}};
  if (op.new_node) doc["node"] = {{"name", op.new_node->name}, {"states", op.new_node->states}};
  if (op.kind == RefinementKind::RemoveCause) {
    doc["removed_parent"] = op.removed_parent;
    doc["prune_orphan"] = op.prune_orphan;
  }
  return doc;
}

RefinementOp refinement_from_json(const json& doc) {
  RefinementOp op;
  try {
    op.kind = parse_refinement_kind(doc.at("kind").get<std::string>());
    op.targets = doc.at("targets").get<std::vector<std::string>>();
    if (doc.contains("node")) {
      op.new_node = NodeSpec{doc["node"].at("name").get<std::string>(),
                             doc["node"].at("states").get<std::vector<std::string>>()};
    }
    op.removed_parent = doc.value("removed_parent", std::string());
    op.prune_orphan = doc.value("prune_orphan", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidRefinement, std::string("refinement declaration: ") + e.what());
  }
  return op;
}

}  // namespace tcd
