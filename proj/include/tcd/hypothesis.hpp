#pragma once

#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"
#include "tcd/kernels.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcd {

// theta of one instance's realized state given its realized parents.
struct CblAssignment {
  std::string scene_id;
  std::size_t instance = 0;  // index within the scene
  std::string node;
  double cbl = 0.0;
};

// One assignment per (instance, target), instance-major. Throws
// UnknownNode, MissingAttribute, UnseenConfig (strict policy).
std::vector<CblAssignment> assign_cbls(const BnModel& model, const Dataset& data,
                                       const std::vector<std::string>& targets);

struct PValueRange {
  double p_min = 0.0;
  double p_max = 1.0;

  bool operator==(const PValueRange&) const = default;
};

// Training CBLs of one node, sorted once; each query is two binary
// searches. Equality is exact: CBLs are count ratios from one learning pass.
class TrainCorpus {
 public:
  TrainCorpus() = default;
  explicit TrainCorpus(std::vector<double> cbls);

  std::size_t size() const { return sorted_.size(); }
  std::size_t count_lower(double cbl) const;
  std::size_t count_equal(double cbl) const;
  // [M_lower / (M+1), (M_lower + M_equal + 1) / (M+1)]. Throws
  // EmptyTrainCorpus.
  PValueRange range(double cbl) const;

 private:
  std::vector<double> sorted_;
};

PValueRange pvalue_range(double test_cbl, std::span<const double> train_cbls);

// Fractional indicator that the range lies below alpha: 0 if p_min > alpha,
// 1 if p_max < alpha, otherwise linear interpolation.
double significance(const PValueRange& p, double alpha);

struct AnalysisConfig {
  double alpha = 0.05;
  std::vector<std::string> target_nodes{"FN"};

  // Throws InvalidConfig.
  void validate() const;
};

struct InstanceDetail {
  std::size_t instance = 0;
  std::string node;
  double cbl = 0.0;
  PValueRange range;
  double n_alpha = 0.0;
};

struct SceneReport {
  std::string scene_id;
  std::size_t n_total = 0;     // N(S): one per (instance, target)
  double n_significant = 0.0;  // N_alpha(S)
  bool relevant = false;       // N_alpha(S) > alpha * N(S)
  std::vector<InstanceDetail> details;
};

struct RunReport {
  std::vector<SceneReport> scenes;  // test scene order
  std::size_t rss = 0;
  double rss_fraction = 0.0;
  double alpha = 0.05;
  std::vector<std::string> target_nodes;
  std::string model_fingerprint;
  std::optional<std::uint64_t> split_seed;
};

bool is_relevant(double n_significant, std::size_t n_total, double alpha);

// Scores every test scene against the training CBL corpus of each target.
// Scenes are scored concurrently under Execution::Parallel; the report is
// identical either way.
RunReport score_scenes(const BnModel& model, const Dataset& train, const Dataset& test,
                       const AnalysisConfig& cfg, Execution exec = Execution::Parallel);

}  // namespace tcd
