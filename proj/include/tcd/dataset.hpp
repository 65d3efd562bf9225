#pragma once

#include "tcd/bn.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tcd {

enum class Source { GroundTruth, Detection };

std::string_view to_string(Source source);

struct RawObjectRecord {
  std::string scene_id;
  Source source = Source::GroundTruth;
  double x = 0.0;  // meters
  double y = 0.0;  // meters
  Assignment attributes;

  bool operator==(const RawObjectRecord&) const = default;
};

// One labeled object observation, fully observed over the analysis nodes.
struct ObjectInstance {
  std::string scene_id;
  double x = 0.0;
  double y = 0.0;
  Assignment attributes;

  bool operator==(const ObjectInstance&) const = default;
};

struct SceneRecord {
  std::string scene_id;
  std::vector<ObjectInstance> instances;

  bool operator==(const SceneRecord&) const = default;
};

struct Dataset {
  std::vector<SceneRecord> scenes;

  std::size_t instance_count() const;
  const SceneRecord* find_scene(std::string_view scene_id) const;

  bool operator==(const Dataset&) const = default;
};

// ---------------------------------------------------------------------------
// Ingestion. The input table is delimiter-separated text with a header row.
// Required columns: scene_id, source, x, y. Every other column is an
// attribute named after its header; an empty cell leaves the attribute
// unset. `source` is "gt" or "det" ("ground_truth"/"detection" also
// accepted). Blank lines and lines starting with '#' are skipped. Fields
// are not quoted; labels must not contain the delimiter.

struct SceneGroup {
  std::string scene_id;
  std::vector<RawObjectRecord> ground_truth;
  std::vector<RawObjectRecord> detections;
};

struct RawTable {
  // Scenes in order of first appearance; record order within a scene kept.
  std::vector<SceneGroup> scenes;
  std::size_t ground_truth_count = 0;
  std::size_t detection_count = 0;
};

// Throws MalformedRow naming the 1-based data row.
std::vector<RawObjectRecord> read_records(std::istream& in, char delimiter = ',');
void write_records(std::ostream& out, std::span<const RawObjectRecord> records, char delimiter = ',');

// Partitions by source and groups by scene. When `structure` is given,
// attribute columns naming one of its nodes must carry a legal state
// (UnknownStateLabel otherwise).
RawTable group_records(std::span<const RawObjectRecord> records,
                       const BnStructure* structure = nullptr);
RawTable ingest(std::istream& in, const BnStructure* structure = nullptr, char delimiter = ',');

// ---------------------------------------------------------------------------
// False-negative derivation.

struct MatchConfig {
  double cost_threshold = 2.0;  // squared meters
  double x_limit = 140.0;       // meters
  double y_limit = 50.0;        // meters
  std::string fn_node = "FN";
  std::string fn_positive = "Yes";
  std::string fn_negative = "No";

  // Throws InvalidConfig.
  void validate() const;
};

// Mean squared positional error over (x, y).
double match_cost(double gx, double gy, double dx, double dy);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Match {
  std::size_t gt = 0;
  std::size_t det = 0;
  double cost = 0.0;
};

// One-to-one greedy matching by ascending cost over pairs with
// cost < threshold. Ties break by (gt index, det index).
std::vector<Match> greedy_match(std::span<const Point> gt, std::span<const Point> det,
                                double cost_threshold);

struct FnDerivation {
  std::vector<ObjectInstance> instances;  // one per in-range GT record
  std::vector<Match> matches;             // indices into the in-range records
  std::size_t false_negatives = 0;
  std::size_t false_positives = 0;  // in-range detections left unmatched
  std::size_t dropped_ground_truth = 0;
  std::size_t dropped_detections = 0;
};

// Range-filters both sides (|x| < x_limit, |y| < y_limit), matches, and
// labels each remaining GT instance FN=Yes/No.
FnDerivation derive_fn(const SceneGroup& scene, const MatchConfig& cfg);

struct DerivationSummary {
  std::size_t scenes_in = 0;
  std::size_t scenes_out = 0;  // scenes with at least one in-range GT
  std::size_t instances = 0;
  std::size_t false_negatives = 0;
  std::size_t false_positives = 0;
  std::size_t dropped_ground_truth = 0;
  std::size_t dropped_detections = 0;
};

// derive_fn over every scene (scenes processed in parallel). Scenes left
// without instances are omitted.
Dataset derive_dataset(const RawTable& table, const MatchConfig& cfg,
                       DerivationSummary* summary = nullptr);

// For tables whose GT rows already carry every label: range filter only.
Dataset dataset_from_ground_truth(const RawTable& table, const MatchConfig& cfg);

// ---------------------------------------------------------------------------
// Train/test split at scene granularity.

struct SplitAssignment {
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

struct SplitResult {
  Dataset train;
  Dataset test;
};

// ceil(fraction * scenes) scenes go to train. Throws EmptyDataset,
// InvalidConfig.
SplitAssignment split_scenes(const Dataset& data, double train_fraction, std::uint64_t seed);
// Throws UnknownScene.
SplitResult apply_split(const Dataset& data, const SplitAssignment& assignment);
SplitResult split(const Dataset& data, double train_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Serialization.

nlohmann::json dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const nlohmann::json& doc);
nlohmann::json split_to_json(const SplitAssignment& split);
SplitAssignment split_from_json(const nlohmann::json& doc);

// Every instance must carry a legal state for every node of `structure`.
// Throws MissingAttribute, UnknownStateLabel.
void check_observed(const Dataset& data, const BnStructure& structure);

}  // namespace tcd
