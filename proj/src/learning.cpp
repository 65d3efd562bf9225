#include "tcd/learning.hpp"

#include <cmath>
#include <limits>

namespace tcd {

BnModel learn_cbts(const BnStructure& structure, const Dataset& train, const LearnConfig& cfg,
                   Execution exec) {
  const EncodedData encoded = encode(train, structure);
  auto counts = count_families(structure, encoded, exec);
  std::vector<Cbt> tables;
  tables.reserve(structure.size());
  for (NodeId id = 0; id < structure.size(); ++id) {
    tables.push_back(Cbt::from_counts(structure, id, std::move(counts[id]), cfg.zero_count_policy));
  }
  return BnModel(structure, std::move(tables), cfg.zero_count_policy);
}

double log_likelihood(const BnModel& model, const Dataset& data) {
  const EncodedData encoded = encode(data, model.structure());
  double total = 0.0;
  for (std::size_t i = 0; i < encoded.instance_count(); ++i) {
    const StateId* codes = encoded.row(i);
    for (NodeId id = 0; id < model.structure().size(); ++id) {
      const Cbt& t = model.cbt(id);
      const double theta = t.theta(t.row_of_codes(codes), codes[id]);
      if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
      total += std::log(theta);
    }
  }
  return total;
}

}  // namespace tcd
