#pragma once

#include "tcd/bn.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace tcd {

// Model files are JSON documents:
//
//   {
//     "format": "tcd-model/1",
//     "zero_count_policy": "uniform",
//     "nodes": [{"name": "Weather", "states": ["Clear", "Rain"]}, ...],
//     "edges": [["Weather", "RoadCondition"], ...],
//     "cbts": {"FN": [{"parents": {"Occlusion": "None", ...},
//                      "counts": [12, 3], "probabilities": [0.8, 0.2]}, ...]}
//   }
//
// "cbts" is optional; a file without it describes a structure only.
// "counts" is optional per row (hand-authored truth models omit it).

inline constexpr const char* kModelFormat = "tcd-model/1";

nlohmann::json structure_to_json(const BnStructure& structure);
nlohmann::json model_to_json(const BnModel& model);

BnStructure structure_from_json(const nlohmann::json& doc);
// Throws MalformedModel when the document carries no CBTs.
BnModel model_from_json(const nlohmann::json& doc);
bool json_has_cbts(const nlohmann::json& doc);

// Filesystem helpers. Read errors throw Io; parse errors MalformedModel.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

BnStructure load_structure(const std::filesystem::path& path);
BnModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const BnModel& model);
void save_structure(const std::filesystem::path& path, const BnStructure& structure);

// Hex FNV-1a digest of the canonical serialization.
std::string model_fingerprint(const BnModel& model);
std::string structure_fingerprint(const BnStructure& structure);

}  // namespace tcd
