#pragma once

#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"
#include "tcd/kernels.hpp"

namespace tcd {

struct LearnConfig {
  ZeroCountPolicy zero_count_policy = ZeroCountPolicy::Uniform;
};

// Maximum-likelihood CBTs: theta[x|u] = M[u,x] / M[u]. Throws
// MissingAttribute, UnknownStateLabel.
BnModel learn_cbts(const BnStructure& structure, const Dataset& train, const LearnConfig& cfg = {},
                   Execution exec = Execution::Parallel);

// Sum of log theta over instances and nodes; -infinity when any factor is
// zero. Throws UnseenConfig under the strict policy.
double log_likelihood(const BnModel& model, const Dataset& data);

}  // namespace tcd
