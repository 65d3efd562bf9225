#include "tcd/bn.hpp"

#include "tcd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace tcd {

namespace {

constexpr double kNormalizationTolerance = 1e-9;

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

std::optional<StateId> NodeSpec::find_state(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<StateId>(i);
  }
  return std::nullopt;
}

StateId NodeSpec::state_index(std::string_view label) const {
  if (auto s = find_state(label)) return *s;
  throw Error(ErrorCode::UnknownState,
              "node '" + name + "' has no state '" + std::string(label) + "'");
}

BnStructure BnStructure::build(std::vector<NodeSpec> nodes, std::vector<Edge> edges) {
  BnStructure s;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& spec = nodes[i];
    if (spec.name.empty()) throw Error(ErrorCode::InvalidNodeSpec, "empty node name");
    if (spec.states.size() < 2) {
      throw Error(ErrorCode::InvalidNodeSpec, "node '" + spec.name + "' needs at least 2 states");
    }
    if (spec.states.size() > std::numeric_limits<StateId>::max()) {
      throw Error(ErrorCode::InvalidNodeSpec, "node '" + spec.name + "' has too many states");
    }
    std::set<std::string_view> seen;
    for (const auto& st : spec.states) {
      if (st.empty()) throw Error(ErrorCode::InvalidNodeSpec, "node '" + spec.name + "' has an empty state label");
      if (!seen.insert(st).second) {
        throw Error(ErrorCode::InvalidNodeSpec,
                    "node '" + spec.name + "' lists state '" + st + "' twice");
      }
    }
    if (!s.index_.emplace(spec.name, i).second) {
      throw Error(ErrorCode::DuplicateNode, "node '" + spec.name + "' declared twice");
    }
  }
  s.nodes_ = std::move(nodes);
  s.parents_.resize(s.nodes_.size());
  s.children_.resize(s.nodes_.size());

  std::set<std::pair<NodeId, NodeId>> seen_edges;
  for (const auto& [from, to] : edges) {
    const NodeId p = s.id_of(from);
    const NodeId c = s.id_of(to);
    if (p == c) throw Error(ErrorCode::SelfLoop, "edge " + from + " -> " + to);
    if (!seen_edges.emplace(p, c).second) {
      throw Error(ErrorCode::DuplicateEdge, "edge " + from + " -> " + to + " listed twice");
    }
    s.parents_[c].push_back(p);
    s.children_[p].push_back(c);
  }
  s.edges_ = std::move(edges);

  // Kahn's algorithm; ties resolved by node declaration order.
  std::vector<std::size_t> indegree(s.nodes_.size());
  for (NodeId i = 0; i < s.nodes_.size(); ++i) indegree[i] = s.parents_[i].size();
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < s.nodes_.size(); ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const NodeId n = ready.top();
    ready.pop();
    s.topo_.push_back(n);
    for (NodeId c : s.children_[n]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (s.topo_.size() != s.nodes_.size()) {
    std::vector<std::string> stuck;
    for (NodeId i = 0; i < s.nodes_.size(); ++i) {
      if (indegree[i] > 0) stuck.push_back(s.nodes_[i].name);
    }
    throw Error(ErrorCode::CyclicGraph, "cycle through {" + join(stuck, ", ") + "}");
  }
  return s;
}

BnStructure build_structure(std::vector<NodeSpec> nodes, std::vector<Edge> edges) {
  return BnStructure::build(std::move(nodes), std::move(edges));
}

std::optional<NodeId> BnStructure::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId BnStructure::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw Error(ErrorCode::UnknownNode, "no node named '" + std::string(name) + "'");
}

std::vector<std::string> BnStructure::parent_names(std::string_view name) const {
  std::vector<std::string> out;
  for (NodeId p : parents_[id_of(name)]) out.push_back(nodes_[p].name);
  return out;
}

bool BnStructure::has_edge(std::string_view parent, std::string_view child) const {
  auto p = find(parent);
  auto c = find(child);
  if (!p || !c) return false;
  const auto& ps = parents_[*c];
  return std::find(ps.begin(), ps.end(), *p) != ps.end();
}

std::string_view to_string(ZeroCountPolicy policy) {
  return policy == ZeroCountPolicy::Strict ? "strict" : "uniform";
}

ZeroCountPolicy parse_zero_count_policy(std::string_view text) {
  if (text == "strict") return ZeroCountPolicy::Strict;
  if (text == "uniform") return ZeroCountPolicy::Uniform;
  throw Error(ErrorCode::InvalidConfig, "zero_count_policy must be 'strict' or 'uniform', got '" +
                                            std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Cbt

Cbt::Cbt(const BnStructure& structure, NodeId child)
    : child_(structure.node(child).name),
      child_id_(child),
      child_states_(structure.node(child).states),
      states_(structure.node(child).states.size()) {
  parent_ids_ = structure.parents(child);
  std::sort(parent_ids_.begin(), parent_ids_.end(), [&](NodeId a, NodeId b) {
    return structure.node(a).name < structure.node(b).name;
  });
  for (NodeId p : parent_ids_) {
    parents_.push_back(structure.node(p).name);
    parent_states_.push_back(structure.node(p).states);
  }
  strides_.assign(parent_ids_.size(), 1);
  rows_ = 1;
  for (std::size_t k = parent_ids_.size(); k-- > 0;) {
    strides_[k] = rows_;
    rows_ *= parent_states_[k].size();
  }
  counts_.assign(rows_ * states_, 0);
  support_.assign(rows_, 0);
  theta_.assign(rows_ * states_, 0.0);
  present_.assign(rows_, 0);
}

Cbt Cbt::from_counts(const BnStructure& structure, NodeId child, std::vector<std::uint64_t> counts,
                     ZeroCountPolicy policy) {
  Cbt t(structure, child);
  if (counts.size() != t.rows_ * t.states_) {
    throw Error(ErrorCode::MalformedModel, "count table for '" + t.child_ + "' has wrong size");
  }
  t.counts_ = std::move(counts);
  t.has_counts_ = true;
  for (std::size_t r = 0; r < t.rows_; ++r) {
    std::uint64_t total = 0;
    for (std::size_t x = 0; x < t.states_; ++x) total += t.counts_[r * t.states_ + x];
    t.support_[r] = total;
    if (total > 0) {
      t.present_[r] = 1;
      for (std::size_t x = 0; x < t.states_; ++x) {
        t.theta_[r * t.states_ + x] =
            static_cast<double>(t.counts_[r * t.states_ + x]) / static_cast<double>(total);
      }
    } else if (policy == ZeroCountPolicy::Uniform) {
      t.present_[r] = 1;
      for (std::size_t x = 0; x < t.states_; ++x) {
        t.theta_[r * t.states_ + x] = 1.0 / static_cast<double>(t.states_);
      }
    }
  }
  return t;
}

Cbt Cbt::from_rows(const BnStructure& structure, NodeId child, const std::vector<Row>& rows,
                   ZeroCountPolicy policy) {
  Cbt t(structure, child);
  bool any_counts = false;
  for (const auto& row : rows) {
    std::size_t r = 0;
    try {
      r = t.row_of(row.config);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedModel, "CBT '" + t.child_ + "': " + e.message());
    }
    if (t.present_[r]) {
      throw Error(ErrorCode::MalformedModel, "CBT '" + t.child_ + "' lists a parent configuration twice");
    }
    if (row.probabilities.size() != t.states_) {
      throw Error(ErrorCode::MalformedModel,
                  "CBT '" + t.child_ + "' row has " + std::to_string(row.probabilities.size()) +
                      " probabilities, expected " + std::to_string(t.states_));
    }
    double sum = 0.0;
    for (double p : row.probabilities) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::MalformedModel, "CBT '" + t.child_ + "' has a probability outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
      throw Error(ErrorCode::MalformedModel, "CBT '" + t.child_ + "' row does not sum to 1");
    }
    std::copy(row.probabilities.begin(), row.probabilities.end(),
              t.theta_.begin() + static_cast<std::ptrdiff_t>(r * t.states_));
    t.present_[r] = 1;
    if (row.counts) {
      if (row.counts->size() != t.states_) {
        throw Error(ErrorCode::MalformedModel, "CBT '" + t.child_ + "' row has wrong count arity");
      }
      any_counts = true;
      std::uint64_t total = 0;
      for (std::size_t x = 0; x < t.states_; ++x) {
        t.counts_[r * t.states_ + x] = (*row.counts)[x];
        total += (*row.counts)[x];
      }
      t.support_[r] = total;
    }
  }
  t.has_counts_ = any_counts;
  if (policy == ZeroCountPolicy::Uniform) {
    for (std::size_t r = 0; r < t.rows_; ++r) {
      if (t.present_[r]) continue;
      t.present_[r] = 1;
      for (std::size_t x = 0; x < t.states_; ++x) {
        t.theta_[r * t.states_ + x] = 1.0 / static_cast<double>(t.states_);
      }
    }
  }
  return t;
}

double Cbt::theta(std::size_t row, StateId state) const {
  if (!present_[row]) {
    std::string cfg;
    for (const auto& [k, v] : config_of(row)) cfg += (cfg.empty() ? "" : ", ") + k + "=" + v;
    throw Error(ErrorCode::UnseenConfig,
                "node '" + child_ + "' has no training support for {" + cfg + "}");
  }
  return theta_[row * states_ + state];
}

std::size_t Cbt::row_of(const ParentConfig& config) const {
  if (config.size() != parents_.size()) {
    throw Error(ErrorCode::ParentConfigMismatch,
                "node '" + child_ + "' expects parents {" + join(parents_, ", ") + "}");
  }
  std::size_t row = 0;
  std::size_t k = 0;
  // Both the map and parents_ iterate in lexicographic order.
  for (const auto& [name, label] : config) {
    if (name != parents_[k]) {
      throw Error(ErrorCode::ParentConfigMismatch,
                  "node '" + child_ + "' expects parents {" + join(parents_, ", ") + "}");
    }
    const auto& states = parent_states_[k];
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) {
      throw Error(ErrorCode::UnknownState, "node '" + name + "' has no state '" + label + "'");
    }
    row += static_cast<std::size_t>(it - states.begin()) * strides_[k];
    ++k;
  }
  return row;
}

ParentConfig Cbt::config_of(std::size_t row) const {
  ParentConfig cfg;
  for (std::size_t k = 0; k < parents_.size(); ++k) {
    const std::size_t code = (row / strides_[k]) % parent_states_[k].size();
    cfg.emplace(parents_[k], parent_states_[k][code]);
  }
  return cfg;
}

std::vector<Cbt::Row> Cbt::rows() const {
  std::vector<Row> out;
  for (std::size_t r = 0; r < rows_; ++r) {
    // Uniform fallbacks carry no information; the policy recreates them.
    if (!present_[r] || (has_counts_ && support_[r] == 0)) continue;
    Row row;
    row.config = config_of(r);
    row.probabilities.assign(theta_.begin() + static_cast<std::ptrdiff_t>(r * states_),
                             theta_.begin() + static_cast<std::ptrdiff_t>((r + 1) * states_));
    if (has_counts_) {
      row.counts.emplace(counts_.begin() + static_cast<std::ptrdiff_t>(r * states_),
                         counts_.begin() + static_cast<std::ptrdiff_t>((r + 1) * states_));
    }
    out.push_back(std::move(row));
  }
  return out;
}

bool Cbt::operator==(const Cbt& other) const {
  return child_ == other.child_ && parents_ == other.parents_ &&
         parent_states_ == other.parent_states_ && child_states_ == other.child_states_ &&
         counts_ == other.counts_ && support_ == other.support_ && theta_ == other.theta_ &&
         present_ == other.present_;
}

// ---------------------------------------------------------------------------
// BnModel

BnModel::BnModel(BnStructure structure, std::vector<Cbt> cbts, ZeroCountPolicy policy)
    : structure_(std::move(structure)), cbts_(std::move(cbts)), policy_(policy) {
  if (cbts_.size() != structure_.size()) {
    throw Error(ErrorCode::MalformedModel, "model needs exactly one CBT per node");
  }
  for (NodeId i = 0; i < cbts_.size(); ++i) {
    const Cbt& t = cbts_[i];
    const NodeSpec& spec = structure_.node(i);
    auto expected = structure_.parent_names(spec.name);
    std::sort(expected.begin(), expected.end());
    if (t.child() != spec.name || t.child_id() != i || t.parents() != expected ||
        t.state_count() != spec.states.size()) {
      throw Error(ErrorCode::MalformedModel, "CBT for '" + spec.name + "' does not match the structure");
    }
  }
}

double BnModel::conditional_prob(std::string_view child, std::string_view state,
                                 const ParentConfig& parents) const {
  const NodeId id = structure_.id_of(child);
  const StateId x = structure_.node(id).state_index(state);
  const Cbt& t = cbts_[id];
  return t.theta(t.row_of(parents), x);
}

double BnModel::joint_prob(const Assignment& assignment) const {
  std::vector<StateId> codes(structure_.size());
  for (NodeId i = 0; i < structure_.size(); ++i) {
    const auto& spec = structure_.node(i);
    auto it = assignment.find(spec.name);
    if (it == assignment.end()) {
      throw Error(ErrorCode::IncompleteAssignment, "assignment lacks node '" + spec.name + "'");
    }
    codes[i] = spec.state_index(it->second);
  }
  double p = 1.0;
  for (NodeId i = 0; i < structure_.size(); ++i) {
    const Cbt& t = cbts_[i];
    p *= t.theta(t.row_of_codes(codes.data()), codes[i]);
  }
  return p;
}

}  // namespace tcd
