#include "tcd/kernels.hpp"

#include "tcd/error.hpp"

#include <omp.h>


namespace tcd {

EncodedData encode(const Dataset& data, const BnStructure& structure, std::span<const NodeId> required) {
  std::vector<NodeId> nodes(required.begin(), required.end());
  if (nodes.empty()) {
    for (NodeId i = 0; i < structure.size(); ++i) nodes.push_back(i);
  }
  EncodedData out;
  out.node_count = structure.size();
  out.codes.assign(data.instance_count() * structure.size(), 0);
  std::size_t row = 0;
  for (const auto& scene : data.scenes) {
    for (std::size_t i = 0; i < scene.instances.size(); ++i, ++row) {
      const auto& attrs = scene.instances[i].attributes;
      StateId* codes = out.codes.data() + row * out.node_count;
      for (NodeId id : nodes) {
        const auto& spec = structure.node(id);
        auto it = attrs.find(spec.name);
        if (it == attrs.end()) {
          throw Error(ErrorCode::MissingAttribute, "scene '" + scene.scene_id + "' instance " +
                                                       std::to_string(i) + " lacks '" + spec.name + "'");
        }
        auto state = spec.find_state(it->second);
        if (!state) {
          throw Error(ErrorCode::UnknownStateLabel, "scene '" + scene.scene_id + "' instance " +
                                                        std::to_string(i) + ": node '" + spec.name +
                                                        "' has no state '" + it->second + "'");
        }
        codes[id] = *state;
      }
    }
    out.scene_offsets.push_back(row);
  }
  return out;
}

namespace {

// Count-table layout per node, derived from an all-zero Cbt.
struct Family {
  NodeId node;
  std::size_t states;
  std::size_t rows;
  std::size_t offset;  // into the flattened per-thread buffer
  Cbt layout;
};

std::vector<Family> families(const BnStructure& structure, std::size_t* total) {
  std::vector<Family> out;
  std::size_t offset = 0;
  for (NodeId id = 0; id < structure.size(); ++id) {
    const std::size_t states = structure.node(id).states.size();
    std::size_t rows = 1;
    for (NodeId p : structure.parents(id)) rows *= structure.node(p).states.size();
    Cbt layout = Cbt::from_counts(structure, id, std::vector<std::uint64_t>(rows * states, 0),
                                  ZeroCountPolicy::Strict);
    out.push_back(Family{id, states, rows, offset, std::move(layout)});
    offset += rows * states;
  }
  *total = offset;
  return out;
}

void tally(const std::vector<Family>& fams, const StateId* codes, std::uint64_t* buffer) {
  for (const auto& f : fams) {
    const std::size_t r = f.layout.row_of_codes(codes);
    ++buffer[f.offset + r * f.states + codes[f.node]];
  }
}

}  // namespace

std::vector<std::vector<std::uint64_t>> count_families(const BnStructure& structure, const EncodedData& data,
                                                       Execution exec) {
  std::size_t total = 0;
  const auto fams = families(structure, &total);
  std::vector<std::uint64_t> merged(total, 0);
  const std::size_t m = data.instance_count();

  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < m; ++i) tally(fams, data.row(i), merged.data());
  } else {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(total, 0);
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        tally(fams, data.row(static_cast<std::size_t>(i)), local.data());
      }
      // Integer sums: the merge order cannot change the result.
#pragma omp critical(tcd_count_merge)
      for (std::size_t k = 0; k < total; ++k) merged[k] += local[k];
    }
  }

  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(fams.size());
  for (const auto& f : fams) {
    out.emplace_back(merged.begin() + static_cast<std::ptrdiff_t>(f.offset),
                     merged.begin() + static_cast<std::ptrdiff_t>(f.offset + f.rows * f.states));
  }
  return out;
}

std::vector<double> compute_cbls(const BnModel& model, NodeId node, const EncodedData& data, Execution exec) {
  const Cbt& table = model.cbt(node);
  const std::size_t m = data.instance_count();
  std::vector<double> out(m);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < m; ++i) {
      const StateId* codes = data.row(i);
      out[i] = table.theta(table.row_of_codes(codes), codes[node]);
    }
    return out;
  }
  // Exceptions cannot cross the parallel region. On failure the serial
  // pass reports the first offending instance.
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    const StateId* codes = data.row(static_cast<std::size_t>(i));
    try {
      out[static_cast<std::size_t>(i)] = table.theta(table.row_of_codes(codes), codes[node]);
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) return compute_cbls(model, node, data, Execution::Serial);
  return out;
}

}  // namespace tcd
