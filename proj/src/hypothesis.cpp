#include "tcd/hypothesis.hpp"

#include "tcd/error.hpp"
#include "tcd/model_io.hpp"

#include <algorithm>
#include <set>

namespace tcd {

std::vector<CblAssignment> assign_cbls(const BnModel& model, const Dataset& data,
                                       const std::vector<std::string>& targets) {
  const auto& structure = model.structure();
  std::vector<NodeId> ids, required;
  for (const auto& t : targets) {
    const NodeId id = structure.id_of(t);
    ids.push_back(id);
    required.push_back(id);
    for (NodeId p : structure.parents(id)) required.push_back(p);
  }
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  const EncodedData encoded = encode(data, structure, required);

  std::vector<std::vector<double>> cbls;
  for (NodeId id : ids) cbls.push_back(compute_cbls(model, id, encoded));

  std::vector<CblAssignment> out;
  out.reserve(encoded.instance_count() * ids.size());
  for (std::size_t s = 0; s < data.scenes.size(); ++s) {
    for (std::size_t row = encoded.scene_offsets[s]; row < encoded.scene_offsets[s + 1]; ++row) {
      for (std::size_t t = 0; t < ids.size(); ++t) {
        out.push_back({data.scenes[s].scene_id, row - encoded.scene_offsets[s], targets[t], cbls[t][row]});
      }
    }
  }
  return out;
}

TrainCorpus::TrainCorpus(std::vector<double> cbls) : sorted_(std::move(cbls)) {
  std::sort(sorted_.begin(), sorted_.end());
}

std::size_t TrainCorpus::count_lower(double cbl) const {
  return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), cbl) - sorted_.begin());
}

std::size_t TrainCorpus::count_equal(double cbl) const {
  auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), cbl);
  return static_cast<std::size_t>(hi - lo);
}

PValueRange TrainCorpus::range(double cbl) const {
  if (sorted_.empty()) throw Error(ErrorCode::EmptyTrainCorpus, "no training CBLs to rank against");
  auto [lo, hi] = std::equal_range(sorted_.begin(), sorted_.end(), cbl);
  const auto lower = static_cast<double>(lo - sorted_.begin());
  const auto equal = static_cast<double>(hi - lo);
  const double denom = static_cast<double>(sorted_.size()) + 1.0;
  return {lower / denom, (lower + equal + 1.0) / denom};
}

PValueRange pvalue_range(double test_cbl, std::span<const double> train_cbls) {
  return TrainCorpus(std::vector<double>(train_cbls.begin(), train_cbls.end())).range(test_cbl);
}

double significance(const PValueRange& p, double alpha) {
  if (p.p_min > alpha) return 0.0;
  if (p.p_max < alpha) return 1.0;
  return (alpha - p.p_min) / (p.p_max - p.p_min);
}

void AnalysisConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie strictly between 0 and 1");
  if (target_nodes.empty()) throw Error(ErrorCode::InvalidConfig, "at least one target node is required");
  std::set<std::string> seen(target_nodes.begin(), target_nodes.end());
  if (seen.size() != target_nodes.size()) throw Error(ErrorCode::InvalidConfig, "target nodes repeat");
}

bool is_relevant(double n_significant, std::size_t n_total, double alpha) {
  return n_significant > alpha * static_cast<double>(n_total);
}

namespace {

SceneReport score_one(const SceneRecord& scene, std::size_t begin, std::size_t end,
                      const std::vector<std::string>& targets, const std::vector<std::vector<double>>& test_cbls,
                      const std::vector<TrainCorpus>& corpora, double alpha) {
  SceneReport rep;
  rep.scene_id = scene.scene_id;
  std::vector<double> sig;
  sig.reserve((end - begin) * targets.size());
  for (std::size_t row = begin; row < end; ++row) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      InstanceDetail d;
      d.instance = row - begin;
      d.node = targets[t];
      d.cbl = test_cbls[t][row];
      d.range = corpora[t].range(d.cbl);
      d.n_alpha = significance(d.range, alpha);
      sig.push_back(d.n_alpha);
      rep.details.push_back(std::move(d));
    }
  }
  // Summing in sorted order makes N_alpha independent of instance order.
  std::sort(sig.begin(), sig.end());
  double n_alpha = 0.0;
  for (double v : sig) n_alpha += v;
  rep.n_total = sig.size();
  rep.n_significant = n_alpha;
  rep.relevant = is_relevant(n_alpha, rep.n_total, alpha);
  return rep;
}

}  // namespace

RunReport score_scenes(const BnModel& model, const Dataset& train, const Dataset& test,
                       const AnalysisConfig& cfg, Execution exec) {
  cfg.validate();
  const auto& structure = model.structure();
  std::vector<NodeId> ids, required;
  for (const auto& t : cfg.target_nodes) {
    const NodeId id = structure.id_of(t);
    ids.push_back(id);
    required.push_back(id);
    for (NodeId p : structure.parents(id)) required.push_back(p);
  }
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());

  const EncodedData train_enc = encode(train, structure, required);
  const EncodedData test_enc = encode(test, structure, required);
  std::vector<TrainCorpus> corpora;
  std::vector<std::vector<double>> test_cbls;
  for (NodeId id : ids) {
    corpora.emplace_back(compute_cbls(model, id, train_enc, exec));
    test_cbls.push_back(compute_cbls(model, id, test_enc, exec));
  }
  if (test_enc.instance_count() > 0 && train_enc.instance_count() == 0) {
    throw Error(ErrorCode::EmptyTrainCorpus, "training set has no instances");
  }

  RunReport report;
  report.alpha = cfg.alpha;
  report.target_nodes = cfg.target_nodes;
  report.model_fingerprint = model_fingerprint(model);
  report.scenes.resize(test.scenes.size());
  const auto n = static_cast<std::ptrdiff_t>(test.scenes.size());
  auto run = [&](std::ptrdiff_t s) {
    const auto i = static_cast<std::size_t>(s);
    report.scenes[i] = score_one(test.scenes[i], test_enc.scene_offsets[i], test_enc.scene_offsets[i + 1],
                                 cfg.target_nodes, test_cbls, corpora, cfg.alpha);
  };
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t s = 0; s < n; ++s) run(s);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t s = 0; s < n; ++s) run(s);
  }
  for (const auto& s : report.scenes) report.rss += s.relevant ? 1 : 0;
  report.rss_fraction = test.scenes.empty() ? 0.0 : static_cast<double>(report.rss) / static_cast<double>(test.scenes.size());
  return report;
}

}  // namespace tcd
