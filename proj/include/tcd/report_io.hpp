#pragma once

#include "tcd/hypothesis.hpp"
#include "tcd/refinement.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tcd {

// Report documents carry a "kind" field: "run", "run_set", "validation"
// or "confounder".

nlohmann::json run_report_to_json(const RunReport& report, bool with_details = true);
RunReport run_report_from_json(const nlohmann::json& doc);

nlohmann::json run_set_to_json(const std::vector<RunReport>& runs, bool with_details = true);
std::vector<RunReport> run_set_from_json(const nlohmann::json& doc);

nlohmann::json validation_report_to_json(const ValidationReport& report);
ValidationReport validation_report_from_json(const nlohmann::json& doc);

nlohmann::json confounder_report_to_json(const ConfounderReport& report);
ConfounderReport confounder_report_from_json(const nlohmann::json& doc);

// Scene table sorted by N_alpha/N descending (rarest first), then totals.
std::string render_run_summary(const RunReport& report);
// min / median / max line over a per-seed sample.
std::string render_distribution(const std::string& label, const std::vector<double>& values);
std::string render_validation_summary(const ValidationReport& report);
std::string render_confounder_summary(const ConfounderReport& report);

// Dispatches on "kind". Throws MalformedReport.
std::string render_report(const nlohmann::json& doc);

}  // namespace tcd
