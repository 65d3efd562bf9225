#include "tcd/dataset.hpp"

#include "tcd/error.hpp"
#include "tcd/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <unordered_map>

namespace tcd {

using nlohmann::json;

std::string_view to_string(Source source) {
  return source == Source::GroundTruth ? "gt" : "det";
}

std::size_t Dataset::instance_count() const {
  std::size_t m = 0;
  for (const auto& s : scenes) m += s.instances.size();
  return m;
}

const SceneRecord* Dataset::find_scene(std::string_view scene_id) const {
  for (const auto& s : scenes) {
    if (s.scene_id == scene_id) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_row(std::size_t row, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRow,
              "row " + std::to_string(row) + " (line " + std::to_string(line) + "): " + what);
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<Source> parse_source(std::string_view text) {
  if (text == "gt" || text == "ground_truth" || text == "GroundTruth") return Source::GroundTruth;
  if (text == "det" || text == "detection" || text == "Detection") return Source::Detection;
  return std::nullopt;
}

}  // namespace

std::vector<RawObjectRecord> read_records(std::istream& in, char delimiter) {
  std::vector<RawObjectRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  int col_scene = -1, col_source = -1, col_x = -1, col_y = -1;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    for (auto f : split_fields(view, delimiter)) header.emplace_back(f);
    break;
  }
  if (header.empty()) return records;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    const int idx = static_cast<int>(i);
    if (h.empty()) throw Error(ErrorCode::MalformedRow, "header column " + std::to_string(i + 1) + " is empty");
    if (std::count(header.begin(), header.end(), h) > 1) {
      throw Error(ErrorCode::MalformedRow, "header repeats column '" + h + "'");
    }
    if (h == "scene_id") col_scene = idx;
    else if (h == "source") col_source = idx;
    else if (h == "x") col_x = idx;
    else if (h == "y") col_y = idx;
  }
  for (auto [col, name] : {std::pair{col_scene, "scene_id"}, std::pair{col_source, "source"},
                           std::pair{col_x, "x"}, std::pair{col_y, "y"}}) {
    if (col < 0) throw Error(ErrorCode::MalformedRow, std::string("header lacks required column '") + name + "'");
  }

  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    ++row;
    const auto fields = split_fields(view, delimiter);
    if (fields.size() != header.size()) {
      bad_row(row, line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()));
    }
    RawObjectRecord rec;
    rec.scene_id = std::string(fields[static_cast<std::size_t>(col_scene)]);
    if (rec.scene_id.empty()) bad_row(row, line_no, "empty scene_id");
    auto src = parse_source(fields[static_cast<std::size_t>(col_source)]);
    if (!src) bad_row(row, line_no, "source must be 'gt' or 'det'");
    rec.source = *src;
    auto x = parse_double(fields[static_cast<std::size_t>(col_x)]);
    auto y = parse_double(fields[static_cast<std::size_t>(col_y)]);
    if (!x || !std::isfinite(*x)) bad_row(row, line_no, "x is not a finite number");
    if (!y || !std::isfinite(*y)) bad_row(row, line_no, "y is not a finite number");
    rec.x = *x;
    rec.y = *y;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const int idx = static_cast<int>(i);
      if (idx == col_scene || idx == col_source || idx == col_x || idx == col_y) continue;
      if (!fields[i].empty()) rec.attributes.emplace(header[i], std::string(fields[i]));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_records(std::ostream& out, std::span<const RawObjectRecord> records, char delimiter) {
  std::vector<std::string> columns;
  {
    std::map<std::string, bool> seen;
    for (const auto& r : records) {
      for (const auto& [k, _] : r.attributes) seen.emplace(k, true);
    }
    for (const auto& [k, _] : seen) columns.push_back(k);
  }
  out << "scene_id" << delimiter << "source" << delimiter << "x" << delimiter << "y";
  for (const auto& c : columns) out << delimiter << c;
  out << '\n';
  char buf[64];
  auto put_number = [&](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, ptr - buf);
  };
  for (const auto& r : records) {
    out << r.scene_id << delimiter << to_string(r.source) << delimiter;
    put_number(r.x);
    out << delimiter;
    put_number(r.y);
    for (const auto& c : columns) {
      out << delimiter;
      if (auto it = r.attributes.find(c); it != r.attributes.end()) out << it->second;
    }
    out << '\n';
  }
}

RawTable group_records(std::span<const RawObjectRecord> records, const BnStructure* structure) {
  RawTable table;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (structure) {
      for (const auto& [name, label] : rec.attributes) {
        auto id = structure->find(name);
        if (id && !structure->node(*id).find_state(label)) {
          throw Error(ErrorCode::UnknownStateLabel, "row " + std::to_string(i + 1) + ": node '" + name +
                                                        "' has no state '" + label + "'");
        }
      }
    }
    auto [it, inserted] = index.emplace(rec.scene_id, table.scenes.size());
    if (inserted) table.scenes.push_back(SceneGroup{rec.scene_id, {}, {}});
    auto& group = table.scenes[it->second];
    if (rec.source == Source::GroundTruth) {
      group.ground_truth.push_back(rec);
      ++table.ground_truth_count;
    } else {
      group.detections.push_back(rec);
      ++table.detection_count;
    }
  }
  return table;
}

RawTable ingest(std::istream& in, const BnStructure* structure, char delimiter) {
  const auto records = read_records(in, delimiter);
  return group_records(records, structure);
}

// ---------------------------------------------------------------------------
// FN derivation

void MatchConfig::validate() const {
  if (!(cost_threshold > 0.0) || !(x_limit > 0.0) || !(y_limit > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "cost_threshold, x_limit and y_limit must be positive");
  }
  if (fn_node.empty() || fn_positive.empty() || fn_negative.empty() || fn_positive == fn_negative) {
    throw Error(ErrorCode::InvalidConfig, "FN node name and two distinct FN labels are required");
  }
}

double match_cost(double gx, double gy, double dx, double dy) {
  const double ex = gx - dx;
  const double ey = gy - dy;
  return (ex * ex + ey * ey) / 2.0;
}

std::vector<Match> greedy_match(std::span<const Point> gt, std::span<const Point> det,
                                double cost_threshold) {
  std::vector<Match> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t d = 0; d < det.size(); ++d) {
      const double c = match_cost(gt[g].x, gt[g].y, det[d].x, det[d].y);
      if (c < cost_threshold) candidates.push_back({g, d, c});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.det < b.det;
  });
  std::vector<char> gt_used(gt.size(), 0), det_used(det.size(), 0);
  std::vector<Match> out;
  for (const auto& m : candidates) {
    if (gt_used[m.gt] || det_used[m.det]) continue;
    gt_used[m.gt] = det_used[m.det] = 1;
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) { return a.gt < b.gt; });
  return out;
}

FnDerivation derive_fn(const SceneGroup& scene, const MatchConfig& cfg) {
  cfg.validate();
  auto in_range = [&](const RawObjectRecord& r) {
    return std::abs(r.x) < cfg.x_limit && std::abs(r.y) < cfg.y_limit;
  };
  FnDerivation out;
  std::vector<const RawObjectRecord*> gts;
  std::vector<Point> gt_pts, det_pts;
  for (const auto& r : scene.ground_truth) {
    if (!in_range(r)) {
      ++out.dropped_ground_truth;
      continue;
    }
    gts.push_back(&r);
    gt_pts.push_back({r.x, r.y});
  }
  for (const auto& r : scene.detections) {
    if (!in_range(r)) {
      ++out.dropped_detections;
      continue;
    }
    det_pts.push_back({r.x, r.y});
  }
  out.matches = greedy_match(gt_pts, det_pts, cfg.cost_threshold);
  std::vector<char> matched(gts.size(), 0);
  for (const auto& m : out.matches) matched[m.gt] = 1;
  out.false_positives = det_pts.size() - out.matches.size();
  for (std::size_t g = 0; g < gts.size(); ++g) {
    ObjectInstance inst{scene.scene_id, gts[g]->x, gts[g]->y, gts[g]->attributes};
    inst.attributes[cfg.fn_node] = matched[g] ? cfg.fn_negative : cfg.fn_positive;
    if (!matched[g]) ++out.false_negatives;
    out.instances.push_back(std::move(inst));
  }
  return out;
}

Dataset derive_dataset(const RawTable& table, const MatchConfig& cfg, DerivationSummary* summary) {
  cfg.validate();
  const auto n = static_cast<std::ptrdiff_t>(table.scenes.size());
  std::vector<FnDerivation> per_scene(table.scenes.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    per_scene[static_cast<std::size_t>(i)] = derive_fn(table.scenes[static_cast<std::size_t>(i)], cfg);
  }
  Dataset data;
  DerivationSummary s;
  s.scenes_in = table.scenes.size();
  for (std::size_t i = 0; i < per_scene.size(); ++i) {
    auto& d = per_scene[i];
    s.false_negatives += d.false_negatives;
    s.false_positives += d.false_positives;
    s.dropped_ground_truth += d.dropped_ground_truth;
    s.dropped_detections += d.dropped_detections;
    s.instances += d.instances.size();
    if (d.instances.empty()) continue;
    data.scenes.push_back(SceneRecord{table.scenes[i].scene_id, std::move(d.instances)});
  }
  s.scenes_out = data.scenes.size();
  if (summary) *summary = s;
  return data;
}

Dataset dataset_from_ground_truth(const RawTable& table, const MatchConfig& cfg) {
  cfg.validate();
  Dataset data;
  for (const auto& g : table.scenes) {
    SceneRecord scene{g.scene_id, {}};
    for (const auto& r : g.ground_truth) {
      if (std::abs(r.x) < cfg.x_limit && std::abs(r.y) < cfg.y_limit) {
        scene.instances.push_back({g.scene_id, r.x, r.y, r.attributes});
      }
    }
    if (!scene.instances.empty()) data.scenes.push_back(std::move(scene));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Split

SplitAssignment split_scenes(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "train fraction must lie strictly between 0 and 1");
  }
  if (data.scenes.empty()) throw Error(ErrorCode::EmptyDataset, "cannot split a dataset without scenes");
  const std::size_t n = data.scenes.size();
  // Guard against products like 0.7 * 10 = 7.000000000000001.
  const double raw = train_fraction * static_cast<double>(n);
  auto n_train = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  n_train = std::min(n_train, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  shuffle_in_place(order, rng);
  std::vector<char> is_train(n, 0);
  for (std::size_t i = 0; i < n_train; ++i) is_train[order[i]] = 1;

  SplitAssignment out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  for (std::size_t i = 0; i < n; ++i) {
    (is_train[i] ? out.train : out.test).push_back(data.scenes[i].scene_id);
  }
  return out;
}

SplitResult apply_split(const Dataset& data, const SplitAssignment& assignment) {
  std::unordered_map<std::string_view, const SceneRecord*> by_id;
  for (const auto& s : data.scenes) by_id.emplace(s.scene_id, &s);
  SplitResult out;
  auto take = [&](const std::vector<std::string>& ids, Dataset& into) {
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw Error(ErrorCode::UnknownScene, "split references unknown scene '" + id + "'");
      into.scenes.push_back(*it->second);
    }
  };
  take(assignment.train, out.train);
  take(assignment.test, out.test);
  return out;
}

SplitResult split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  return apply_split(data, split_scenes(data, train_fraction, seed));
}

// ---------------------------------------------------------------------------
// Serialization

json dataset_to_json(const Dataset& data) {
  json scenes = json::array();
  for (const auto& s : data.scenes) {
    json instances = json::array();
    for (const auto& inst : s.instances) {
      json attrs = json::object();
      for (const auto& [k, v] : inst.attributes) attrs[k] = v;
      instances.push_back({{"x", inst.x}, {"y", inst.y}, {"attributes", std::move(attrs)}});
    }
    scenes.push_back({{"scene_id", s.scene_id}, {"instances", std::move(instances)}});
  }
  return {{"format", "tcd-dataset/1"}, {"scenes", std::move(scenes)}};
}

Dataset dataset_from_json(const json& doc) {
  Dataset data;
  try {
    for (const auto& s : doc.at("scenes")) {
      SceneRecord scene;
      scene.scene_id = s.at("scene_id").get<std::string>();
      for (const auto& i : s.at("instances")) {
        ObjectInstance inst;
        inst.scene_id = scene.scene_id;
        inst.x = i.value("x", 0.0);
        inst.y = i.value("y", 0.0);
        for (const auto& [k, v] : i.at("attributes").items()) inst.attributes.emplace(k, v.get<std::string>());
        scene.instances.push_back(std::move(inst));
      }
      if (scene.instances.empty()) {
        throw Error(ErrorCode::MalformedRow, "scene '" + scene.scene_id + "' has no instances");
      }
      data.scenes.push_back(std::move(scene));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("dataset document: ") + e.what());
  }
  return data;
}

json split_to_json(const SplitAssignment& split) {
  return {{"format", "tcd-split/1"},
          {"seed", split.seed},
          {"train_fraction", split.train_fraction},
          {"train", split.train},
          {"test", split.test}};
}

SplitAssignment split_from_json(const json& doc) {
  SplitAssignment s;
  try {
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.train_fraction = doc.at("train_fraction").get<double>();
    s.train = doc.at("train").get<std::vector<std::string>>();
    s.test = doc.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("split document: ") + e.what());
  }
  return s;
}

void check_observed(const Dataset& data, const BnStructure& structure) {
  for (const auto& scene : data.scenes) {
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
      const auto& attrs = scene.instances[i].attributes;
      for (const auto& spec : structure.nodes()) {
        auto it = attrs.find(spec.name);
        if (it == attrs.end()) {
          throw Error(ErrorCode::MissingAttribute, "scene '" + scene.scene_id + "' instance " +
                                                       std::to_string(i) + " lacks '" + spec.name + "'");
        }
        if (!spec.find_state(it->second)) {
          throw Error(ErrorCode::UnknownStateLabel, "scene '" + scene.scene_id + "' instance " +
                                                        std::to_string(i) + ": node '" + spec.name +
                                                        "' has no state '" + it->second + "'");
        }
      }
    }
  }
}

}  // namespace tcd
