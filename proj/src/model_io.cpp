#include "tcd/model_io.hpp"

#include "tcd/error.hpp"
#include "tcd/util.hpp"

#include <fstream>
#include <sstream>

namespace tcd {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedModel, what); }

}  // namespace

json structure_to_json(const BnStructure& structure) {
  json doc;
  doc["format"] = kModelFormat;
  json nodes = json::array();
  for (const auto& n : structure.nodes()) nodes.push_back({{"name", n.name}, {"states", n.states}});
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& [p, c] : structure.edges()) edges.push_back(json::array({p, c}));
  doc["edges"] = std::move(edges);
  return doc;
}

json model_to_json(const BnModel& model) {
  json doc = structure_to_json(model.structure());
  doc["zero_count_policy"] = std::string(to_string(model.policy()));
  json cbts = json::object();
  for (const auto& t : model.cbts()) {
    json rows = json::array();
    for (const auto& row : t.rows()) {
      json r;
      r["parents"] = json::object();
      for (const auto& [k, v] : row.config) r["parents"][k] = v;
      r["probabilities"] = row.probabilities;
      if (row.counts) r["counts"] = *row.counts;
      rows.push_back(std::move(r));
    }
    cbts[t.child()] = std::move(rows);
  }
  doc["cbts"] = std::move(cbts);
  return doc;
}

BnStructure structure_from_json(const json& doc) {
  if (!doc.is_object()) malformed("model document must be an object");
  if (auto f = doc.find("format"); f != doc.end() && *f != kModelFormat) {
    malformed("unsupported model format " + f->dump());
  }
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) malformed("model lacks a 'nodes' array");
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
  try {
    for (const auto& n : doc["nodes"]) {
      nodes.push_back({n.at("name").get<std::string>(), n.at("states").get<std::vector<std::string>>()});
    }
    if (doc.contains("edges")) {
      for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2) malformed("edge entries must be [parent, child]");
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    malformed(std::string("bad node/edge entry: ") + e.what());
  }
  return build_structure(std::move(nodes), std::move(edges));
}

bool json_has_cbts(const json& doc) { return doc.is_object() && doc.contains("cbts"); }

BnModel model_from_json(const json& doc) {
  BnStructure structure = structure_from_json(doc);
  if (!json_has_cbts(doc)) malformed("model document has no 'cbts' section");
  ZeroCountPolicy policy = ZeroCountPolicy::Uniform;
  if (doc.contains("zero_count_policy")) {
    try {
      policy = parse_zero_count_policy(doc["zero_count_policy"].get<std::string>());
    } catch (const json::exception& e) {
      malformed(e.what());
    }
  }
  const json& cbts = doc["cbts"];
  if (!cbts.is_object()) malformed("'cbts' must be an object keyed by node name");
  for (const auto& [name, _] : cbts.items()) {
    if (!structure.find(name)) malformed("CBT for unknown node '" + name + "'");
  }
  std::vector<Cbt> tables;
  for (NodeId id = 0; id < structure.size(); ++id) {
    const auto& name = structure.node(id).name;
    std::vector<Cbt::Row> rows;
    if (auto it = cbts.find(name); it != cbts.end()) {
      try {
        for (const auto& r : *it) {
          Cbt::Row row;
          for (const auto& [k, v] : r.at("parents").items()) row.config.emplace(k, v.get<std::string>());
          row.probabilities = r.at("probabilities").get<std::vector<double>>();
          if (r.contains("counts")) row.counts = r["counts"].get<std::vector<std::uint64_t>>();
          rows.push_back(std::move(row));
        }
      } catch (const json::exception& e) {
        malformed("CBT '" + name + "': " + std::string(e.what()));
      }
    }
    tables.push_back(Cbt::from_rows(structure, id, rows, policy));
  }
  return BnModel(std::move(structure), std::move(tables), policy);
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedModel, path.string() + ": " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

BnStructure load_structure(const std::filesystem::path& path) {
  try {
    return structure_from_json(read_json_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

BnModel load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void save_model(const std::filesystem::path& path, const BnModel& model) {
  write_json_file(path, model_to_json(model));
}

void save_structure(const std::filesystem::path& path, const BnStructure& structure) {
  write_json_file(path, structure_to_json(structure));
}

std::string model_fingerprint(const BnModel& model) {
  return hex64(fnv1a64(model_to_json(model).dump()));
}

std::string structure_fingerprint(const BnStructure& structure) {
  return hex64(fnv1a64(structure_to_json(structure).dump()));
}

}  // namespace tcd
