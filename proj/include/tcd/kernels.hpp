#pragma once

// Data-parallel inner loops shared by learning and scoring. Each kernel has
// an OpenMP path and a plain serial path; the serial path is the reference
// the tests and the benchmark compare against.

#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tcd {

enum class Execution { Serial, Parallel };

// Dataset encoded as state indices: instances x nodes, row-major, with
// scene boundaries kept as offsets.
struct EncodedData {
  std::size_t node_count = 0;
  std::vector<StateId> codes;
  std::vector<std::size_t> scene_offsets{0};

  std::size_t instance_count() const { return scene_offsets.back(); }
  std::size_t scene_count() const { return scene_offsets.size() - 1; }
  const StateId* row(std::size_t instance) const { return codes.data() + instance * node_count; }
};

// Encodes the nodes listed in `required` (all nodes when empty); other
// columns are left at 0 and must not be read. Throws MissingAttribute,
// UnknownStateLabel.
EncodedData encode(const Dataset& data, const BnStructure& structure,
                   std::span<const NodeId> required = {});

// Family counts M[u, x] for every node, laid out like Cbt::from_counts
// expects. The result does not depend on `exec` or on thread count.
std::vector<std::vector<std::uint64_t>> count_families(const BnStructure& structure,
                                                       const EncodedData& data,
                                                       Execution exec = Execution::Parallel);

// CBL (theta of the realized state given realized parents) of `node` for
// every instance. Throws UnseenConfig under the strict policy.
std::vector<double> compute_cbls(const BnModel& model, NodeId node, const EncodedData& data,
                                 Execution exec = Execution::Parallel);

}  // namespace tcd
