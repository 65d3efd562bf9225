#include "tcd/report_io.hpp"

#include "tcd/error.hpp"
#include "tcd/util.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace tcd {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedReport, what); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

void expect_kind(const json& doc, const char* kind) {
  if (!doc.is_object() || doc.value("kind", std::string()) != kind) {
    malformed(std::string("expected a report of kind '") + kind + "'");
  }
}

}  // namespace

json run_report_to_json(const RunReport& report, bool with_details) {
  json scenes = json::array();
  for (const auto& s : report.scenes) {
    json scene = {{"scene_id", s.scene_id},
                  {"n_total", s.n_total},
                  {"n_significant", s.n_significant},
                  {"relevant", s.relevant}};
    if (with_details) {
      json details = json::array();
      for (const auto& d : s.details) {
        details.push_back({{"instance", d.instance},
                           {"node", d.node},
                           {"cbl", d.cbl},
                           {"p_min", d.range.p_min},
                           {"p_max", d.range.p_max},
                           {"n_alpha", d.n_alpha}});
      }
      scene["details"] = std::move(details);
    }
    scenes.push_back(std::move(scene));
  }
  return {{"kind", "run"},
          {"alpha", report.alpha},
          {"target_nodes", report.target_nodes},
          {"model_fingerprint", report.model_fingerprint},
          {"split_seed", report.split_seed ? json(*report.split_seed) : json(nullptr)},
          {"rss", report.rss},
          {"rss_fraction", report.rss_fraction},
          {"test_scenes", report.scenes.size()},
          {"scenes", std::move(scenes)}};
}

RunReport run_report_from_json(const json& doc) {
  expect_kind(doc, "run");
  RunReport r;
  try {
    r.alpha = doc.at("alpha").get<double>();
    r.target_nodes = doc.at("target_nodes").get<std::vector<std::string>>();
    r.model_fingerprint = doc.value("model_fingerprint", std::string());
    if (doc.contains("split_seed") && !doc["split_seed"].is_null()) r.split_seed = doc["split_seed"].get<std::uint64_t>();
    for (const auto& s : doc.at("scenes")) {
      SceneReport scene;
      scene.scene_id = s.at("scene_id").get<std::string>();
      scene.n_total = s.at("n_total").get<std::size_t>();
      scene.n_significant = s.at("n_significant").get<double>();
      scene.relevant = s.at("relevant").get<bool>();
      if (scene.n_significant < 0.0 || scene.n_significant > static_cast<double>(scene.n_total)) {
        malformed("scene '" + scene.scene_id + "' has N_alpha outside [0, N]");
      }
      for (const auto& d : s.value("details", json::array())) {
        scene.details.push_back({d.at("instance").get<std::size_t>(), d.at("node").get<std::string>(),
                                 d.at("cbl").get<double>(),
                                 {d.at("p_min").get<double>(), d.at("p_max").get<double>()},
                                 d.at("n_alpha").get<double>()});
      }
      r.scenes.push_back(std::move(scene));
    }
    r.rss = doc.at("rss").get<std::size_t>();
    r.rss_fraction = doc.at("rss_fraction").get<double>();
  } catch (const json::exception& e) {
    malformed(std::string("run report: ") + e.what());
  }
  const auto counted = static_cast<std::size_t>(
      std::count_if(r.scenes.begin(), r.scenes.end(), [](const SceneReport& s) { return s.relevant; }));
  if (counted != r.rss) malformed("rss does not equal the number of relevant scenes");
  return r;
}

json run_set_to_json(const std::vector<RunReport>& runs, bool with_details) {
  json list = json::array();
  for (const auto& r : runs) list.push_back(run_report_to_json(r, with_details));
  return {{"kind", "run_set"}, {"runs", std::move(list)}};
}

std::vector<RunReport> run_set_from_json(const json& doc) {
  expect_kind(doc, "run_set");
  std::vector<RunReport> out;
  if (!doc.contains("runs") || !doc["runs"].is_array()) malformed("run_set lacks 'runs'");
  for (const auto& r : doc["runs"]) out.push_back(run_report_from_json(r));
  return out;
}

json validation_report_to_json(const ValidationReport& report) {
  json iterations = json::array();
  for (const auto& it : report.iterations) {
    iterations.push_back({{"seed", it.seed},
                          {"rss_initial", it.rss_initial},
                          {"rss_after", it.rss_after},
                          {"test_scenes", it.test_scenes},
                          {"relative_rss_change", optional_number(it.relative_change)},
                          {"proposition", std::string(to_string(it.proposition))},
                          {"tie", it.tie}});
  }
  return {{"kind", "validation"},
          {"node", report.node},
          {"rss_initial", report.rss_initial},
          {"rss_after", report.rss_after},
          {"relative_rss_change", optional_number(report.relative_rss_change)},
          {"proposition", std::string(to_string(report.proposition))},
          {"tie", report.tie},
          {"structure_before", report.structure_before},
          {"structure_after", report.structure_after},
          {"iterations", std::move(iterations)}};
}

namespace {

Proposition parse_proposition(const std::string& s) {
  if (s == "valid") return Proposition::Valid;
  if (s == "invalid") return Proposition::Invalid;
  malformed("proposition must be 'valid' or 'invalid'");
}

}  // namespace

ValidationReport validation_report_from_json(const json& doc) {
  expect_kind(doc, "validation");
  ValidationReport r;
  try {
    r.node = doc.at("node").get<std::string>();
    r.rss_initial = doc.at("rss_initial").get<double>();
    r.rss_after = doc.at("rss_after").get<double>();
    r.relative_rss_change = read_optional_number(doc, "relative_rss_change");
    r.proposition = parse_proposition(doc.at("proposition").get<std::string>());
    r.tie = doc.value("tie", false);
    r.structure_before = doc.value("structure_before", std::string());
    r.structure_after = doc.value("structure_after", std::string());
    for (const auto& it : doc.at("iterations")) {
      ValidationIteration v;
      v.seed = it.at("seed").get<std::uint64_t>();
      v.rss_initial = it.at("rss_initial").get<std::size_t>();
      v.rss_after = it.at("rss_after").get<std::size_t>();
      v.test_scenes = it.value("test_scenes", std::size_t{0});
      v.relative_change = read_optional_number(it, "relative_rss_change");
      v.proposition = parse_proposition(it.at("proposition").get<std::string>());
      v.tie = it.value("tie", false);
      r.iterations.push_back(v);
    }
  } catch (const json::exception& e) {
    malformed(std::string("validation report: ") + e.what());
  }
  if (r.proposition != proposition_for(r.rss_initial, r.rss_after)) {
    malformed("proposition disagrees with the RSS comparison");
  }
  return r;
}

json confounder_report_to_json(const ConfounderReport& report) {
  return {{"kind", "confounder"},
          {"new_node", report.new_node},
          {"child", report.child},
          {"parent", report.parent},
          {"confounder_indicated", report.confounder_indicated},
          {"child_report", validation_report_to_json(report.child_report)},
          {"parent_report", validation_report_to_json(report.parent_report)}};
}

ConfounderReport confounder_report_from_json(const json& doc) {
  expect_kind(doc, "confounder");
  ConfounderReport r;
  try {
    r.new_node = doc.at("new_node").get<std::string>();
    r.child = doc.at("child").get<std::string>();
    r.parent = doc.at("parent").get<std::string>();
    r.confounder_indicated = doc.at("confounder_indicated").get<bool>();
    r.child_report = validation_report_from_json(doc.at("child_report"));
    r.parent_report = validation_report_from_json(doc.at("parent_report"));
  } catch (const json::exception& e) {
    malformed(std::string("confounder report: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_run_summary(const RunReport& report) {
  std::vector<std::size_t> order(report.scenes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto ratio = [&](std::size_t i) {
    const auto& s = report.scenes[i];
    return s.n_total ? s.n_significant / static_cast<double>(s.n_total) : 0.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });

  std::size_t width = 8;
  for (const auto& s : report.scenes) width = std::max(width, s.scene_id.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "scene" << "  " << std::right << std::setw(6) << "N"
      << "  " << std::setw(10) << "N_alpha" << "  " << std::setw(8) << "ratio" << "  relevant\n";
  for (std::size_t i : order) {
    const auto& s = report.scenes[i];
    out << std::left << std::setw(static_cast<int>(width)) << s.scene_id << "  " << std::right << std::setw(6)
        << s.n_total << "  " << std::setw(10) << std::fixed << std::setprecision(4) << s.n_significant << "  "
        << std::setw(8) << ratio(i) << "  " << (s.relevant ? "yes" : "no") << '\n';
  }
  std::string targets;
  for (const auto& t : report.target_nodes) targets += (targets.empty() ? "" : ",") + t;
  out << "RSS = " << report.rss << " of " << report.scenes.size() << " test scenes (" << std::fixed
      << std::setprecision(2) << 100.0 * report.rss_fraction << "%), alpha = " << std::setprecision(4)
      << report.alpha << ", targets = " << targets << '\n';
  return out.str();
}

std::string render_distribution(const std::string& label, const std::vector<double>& values) {
  std::ostringstream out;
  out << label << ": n=" << values.size();
  if (!values.empty()) {
    out << std::fixed << std::setprecision(2) << " min=" << *std::min_element(values.begin(), values.end())
        << " median=" << median(values) << " max=" << *std::max_element(values.begin(), values.end());
  }
  out << '\n';
  return out.str();
}

std::string render_validation_summary(const ValidationReport& report) {
  std::ostringstream out;
  out << "seed        RSS_initial  RSS_after  relative(%)  proposition\n";
  std::vector<double> initial, after, relative;
  for (const auto& it : report.iterations) {
    out << std::left << std::setw(10) << it.seed << "  " << std::right << std::setw(11) << it.rss_initial << "  "
        << std::setw(9) << it.rss_after << "  " << std::setw(11);
    if (it.relative_change) {
      out << std::fixed << std::setprecision(2) << *it.relative_change;
      relative.push_back(*it.relative_change);
    } else {
      out << "n/a";
    }
    out << "  " << to_string(it.proposition) << (it.tie ? " (tie)" : "") << '\n';
    initial.push_back(static_cast<double>(it.rss_initial));
    after.push_back(static_cast<double>(it.rss_after));
  }
  out << render_distribution("RSS_initial per seed", initial);
  out << render_distribution("RSS_after per seed", after);
  out << render_distribution("relative RSS change (%) per seed", relative);
  out << "node " << report.node << ": median RSS " << std::fixed << std::setprecision(1) << report.rss_initial
      << " -> " << report.rss_after << ", relative ";
  if (report.relative_rss_change) {
    out << std::setprecision(2) << *report.relative_rss_change << "%";
  } else {
    out << "n/a";
  }
  out << ", proposition " << to_string(report.proposition) << (report.tie ? " (tie)" : "") << " ("
      << report.valid_count() << "/" << report.iterations.size() << " seeds valid)\n";
  return out.str();
}

std::string render_confounder_summary(const ConfounderReport& report) {
  std::ostringstream out;
  out << "direct cause " << report.new_node << " -> " << report.child << '\n'
      << render_validation_summary(report.child_report) << "direct cause " << report.new_node << " -> "
      << report.parent << '\n'
      << render_validation_summary(report.parent_report) << "confounder "
      << (report.confounder_indicated ? "indicated" : "not indicated") << " for " << report.new_node << " over ("
      << report.child << ", " << report.parent << ")\n";
  return out.str();
}

std::string render_report(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) malformed("report has no 'kind'");
  const std::string kind = doc["kind"].is_string() ? doc["kind"].get<std::string>() : std::string();
  if (kind == "run") return render_run_summary(run_report_from_json(doc));
  if (kind == "run_set") {
    const auto runs = run_set_from_json(doc);
    std::string out;
    std::vector<double> rss;
    for (const auto& r : runs) {
      out += "--- split seed " + (r.split_seed ? std::to_string(*r.split_seed) : std::string("n/a")) + '\n';
      out += render_run_summary(r);
      rss.push_back(static_cast<double>(r.rss));
    }
    out += render_distribution("RSS per seed", rss);
    return out;
  }
  if (kind == "validation") return render_validation_summary(validation_report_from_json(doc));
  if (kind == "confounder") return render_confounder_summary(confounder_report_from_json(doc));
  malformed("unknown report kind '" + kind + "'");
}

}  // namespace tcd
