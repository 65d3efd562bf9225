#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tcd {

using NodeId = std::size_t;
using StateId = std::uint16_t;

struct NodeSpec {
  std::string name;
  std::vector<std::string> states;

  std::optional<StateId> find_state(std::string_view label) const;
  // Throws UnknownState.
  StateId state_index(std::string_view label) const;

  bool operator==(const NodeSpec&) const = default;
};

// (parent, child)
using Edge = std::pair<std::string, std::string>;

// A validated DAG over categorical nodes. Immutable once built; edits go
// through build() again (see refinement).
class BnStructure {
 public:
  BnStructure() = default;

  // Throws InvalidNodeSpec, DuplicateNode, UnknownNode, SelfLoop,
  // DuplicateEdge, CyclicGraph.
  static BnStructure build(std::vector<NodeSpec> nodes, std::vector<Edge> edges);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const NodeSpec& node(NodeId id) const { return nodes_.at(id); }
  const NodeSpec& node(std::string_view name) const { return nodes_[id_of(name)]; }
  std::optional<NodeId> find(std::string_view name) const;
  NodeId id_of(std::string_view name) const;

  // Parents in edge insertion order.
  const std::vector<NodeId>& parents(NodeId id) const { return parents_.at(id); }
  std::vector<std::string> parent_names(std::string_view name) const;
  const std::vector<NodeId>& children(NodeId id) const { return children_.at(id); }
  const std::vector<NodeId>& topological_order() const { return topo_; }
  bool has_edge(std::string_view parent, std::string_view child) const;

  bool operator==(const BnStructure& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> topo_;
  std::map<std::string, NodeId, std::less<>> index_;
};

BnStructure build_structure(std::vector<NodeSpec> nodes, std::vector<Edge> edges);

// Parent name -> state label. std::map keeps keys in lexicographic order,
// which is the canonical parent order used for CBT row keys.
using ParentConfig = std::map<std::string, std::string, std::less<>>;
// Node name -> state label for a full or partial instance.
using Assignment = std::map<std::string, std::string, std::less<>>;

enum class ZeroCountPolicy { Strict, Uniform };

std::string_view to_string(ZeroCountPolicy policy);
ZeroCountPolicy parse_zero_count_policy(std::string_view text);

// Conditional belief table of one node. Rows enumerate parent
// configurations in mixed radix over the parents sorted by name, with the
// last parent varying fastest.
class Cbt {
 public:
  // Learned table: `counts` is rows x states, row-major. Rows with zero
  // support are absent under Strict and uniform under Uniform.
  static Cbt from_counts(const BnStructure& structure, NodeId child,
                         std::vector<std::uint64_t> counts, ZeroCountPolicy policy);

  struct Row {
    ParentConfig config;
    std::vector<double> probabilities;
    std::optional<std::vector<std::uint64_t>> counts;
  };
  // Table given row by row (hand-authored or re-loaded). Rows not listed
  // follow `policy`. Throws MalformedModel on shape or normalization errors.
  static Cbt from_rows(const BnStructure& structure, NodeId child, const std::vector<Row>& rows,
                       ZeroCountPolicy policy);

  const std::string& child() const { return child_; }
  NodeId child_id() const { return child_id_; }
  // Sorted by name.
  const std::vector<std::string>& parents() const { return parents_; }
  const std::vector<NodeId>& parent_ids() const { return parent_ids_; }
  std::size_t state_count() const { return states_; }
  std::size_t row_count() const { return rows_; }

  bool has_row(std::size_t row) const { return present_[row] != 0; }
  std::uint64_t support(std::size_t row) const { return support_[row]; }
  std::uint64_t count(std::size_t row, StateId state) const { return counts_[row * states_ + state]; }
  // Throws UnseenConfig when the row is absent.
  double theta(std::size_t row, StateId state) const;
  std::span<const double> probabilities(std::size_t row) const {
    return {theta_.data() + row * states_, states_};
  }

  // Throws ParentConfigMismatch, UnknownState.
  std::size_t row_of(const ParentConfig& config) const;

  // Row for an encoded instance: `codes` is indexed by NodeId.
  std::size_t row_of_codes(const StateId* codes) const {
    std::size_t row = 0;
    for (std::size_t k = 0; k < parent_ids_.size(); ++k) row += codes[parent_ids_[k]] * strides_[k];
    return row;
  }

  ParentConfig config_of(std::size_t row) const;
  std::vector<Row> rows() const;

  bool operator==(const Cbt& other) const;

 private:
  Cbt(const BnStructure& structure, NodeId child);

  std::string child_;
  NodeId child_id_ = 0;
  std::vector<std::string> parents_;
  std::vector<NodeId> parent_ids_;
  std::vector<std::vector<std::string>> parent_states_;
  std::vector<std::string> child_states_;
  std::vector<std::size_t> strides_;
  std::size_t states_ = 0;
  std::size_t rows_ = 1;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> support_;
  std::vector<double> theta_;
  std::vector<char> present_;
  bool has_counts_ = false;
};

// Structure plus one CBT per node. Immutable; safe for concurrent reads.
class BnModel {
 public:
  // Throws MalformedModel if cbts do not line up with the structure.
  BnModel(BnStructure structure, std::vector<Cbt> cbts, ZeroCountPolicy policy);

  const BnStructure& structure() const { return structure_; }
  const std::vector<Cbt>& cbts() const { return cbts_; }
  const Cbt& cbt(NodeId id) const { return cbts_.at(id); }
  const Cbt& cbt(std::string_view name) const { return cbts_[structure_.id_of(name)]; }
  ZeroCountPolicy policy() const { return policy_; }

  // Throws UnknownNode, UnknownState, ParentConfigMismatch, UnseenConfig.
  double conditional_prob(std::string_view child, std::string_view state,
                          const ParentConfig& parents) const;

  // Product of per-node conditionals. Throws IncompleteAssignment.
  double joint_prob(const Assignment& assignment) const;

  bool operator==(const BnModel& other) const {
    return structure_ == other.structure_ && cbts_ == other.cbts_ && policy_ == other.policy_;
  }

 private:
  BnStructure structure_;
  std::vector<Cbt> cbts_;
  ZeroCountPolicy policy_;
};

}  // namespace tcd
