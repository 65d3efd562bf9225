#include "testkit.hpp"

#include "tcd/dataset.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace tcd;
using testkit::error_of;

namespace {

RawObjectRecord gt(std::string scene, double x, double y, Assignment a = {}) {
  return {std::move(scene), Source::GroundTruth, x, y, std::move(a)};
}
RawObjectRecord det(std::string scene, double x, double y) { return {std::move(scene), Source::Detection, x, y, {}}; }

SceneGroup scene_of(std::vector<RawObjectRecord> records) {
  RawTable t = group_records(records);
  return t.scenes.front();
}

Dataset scenes(std::size_t n) {
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) d.scenes.push_back({"s" + std::to_string(i), {{"s" + std::to_string(i), 0, 0, {}}}});
  return d;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("ingestion groups by scene and source") {
    std::istringstream in(
        "scene_id,source,x,y,Weather\n"
        "a,gt,1,2,Clear\n"
        "# comment\n"
        "a,det,1.1,2,\n"
        "\n"
        "b,gt,5,5,Rain\n"
        "b,gt,6,6,\n"
        "b,det,5,5,\n");
    const RawTable t = ingest(in);
    REQUIRE(t.scenes.size() == 2);
    CHECK(t.scenes[0].scene_id == "a");
    CHECK(t.scenes[0].ground_truth.size() == 1);
    CHECK(t.scenes[0].detections.size() == 1);
    CHECK(t.scenes[1].ground_truth.size() == 2);
    CHECK(t.scenes[1].detections.size() == 1);
    CHECK(t.ground_truth_count == 3);
    CHECK(t.detection_count == 2);
    CHECK(t.scenes[1].ground_truth[0].attributes.at("Weather") == "Rain");
    CHECK(t.scenes[1].ground_truth[1].attributes.count("Weather") == 0);
  }

  TEST_CASE("empty input gives an empty table") {
    std::istringstream empty("");
    CHECK(ingest(empty).scenes.empty());
    std::istringstream header_only("scene_id,source,x,y\n");
    CHECK(ingest(header_only).scenes.empty());
  }

  TEST_CASE("malformed rows") {
    std::istringstream bad_x("scene_id,source,x,y\na,gt,1,2\na,gt,abc,2\n");
    try {
      read_records(bad_x);
      FAIL("expected MalformedRow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedRow);
      CHECK(e.message().find("row 2") != std::string::npos);
    }
    std::istringstream bad_source("scene_id,source,x,y\na,radar,1,2\n");
    CHECK(error_of([&] { read_records(bad_source); }) == ErrorCode::MalformedRow);
    std::istringstream no_header("scene_id,x,y\na,1,2\n");
    CHECK(error_of([&] { read_records(no_header); }) == ErrorCode::MalformedRow);
    std::istringstream short_row("scene_id,source,x,y\na,gt,1\n");
    CHECK(error_of([&] { read_records(short_row); }) == ErrorCode::MalformedRow);
  }

  TEST_CASE("unknown labels are caught against a structure") {
    const auto s = testkit::baseline_structure();
    const std::vector<RawObjectRecord> recs{gt("a", 0, 0, {{"Weather", "Snow"}})};
    CHECK(error_of([&] { group_records(recs, &s); }) == ErrorCode::UnknownStateLabel);
  }

  TEST_CASE("records round-trip through text") {
    const std::vector<RawObjectRecord> recs{gt("a", 1.25, -3.5, {{"W", "x"}}), det("a", 0.1, 1e-3),
                                            gt("b", 139.999, 49.5, {{"V", "y"}})};
    std::ostringstream out;
    write_records(out, recs);
    std::istringstream in(out.str());
    CHECK(read_records(in) == recs);
  }

  TEST_CASE("matching examples") {
    const MatchConfig cfg;
    auto d1 = derive_fn(scene_of({gt("s", 10, 5), det("s", 10, 5)}), cfg);
    REQUIRE(d1.instances.size() == 1);
    CHECK(d1.matches.front().cost == 0.0);
    CHECK(d1.instances[0].attributes.at("FN") == "No");

    auto d2 = derive_fn(scene_of({gt("s", 10, 5), det("s", 30, 5)}), cfg);
    CHECK(match_cost(10, 5, 30, 5) == 200.0);
    CHECK(d2.instances[0].attributes.at("FN") == "Yes");
    CHECK(d2.false_positives == 1);

    auto d3 = derive_fn(scene_of({gt("s", 0, 0), gt("s", 1, 0), det("s", 0.1, 0)}), cfg);
    REQUIRE(d3.matches.size() == 1);
    CHECK(d3.matches[0].gt == 0);
    CHECK(d3.matches[0].cost == doctest::Approx(0.005));
    CHECK(d3.instances[0].attributes.at("FN") == "No");
    CHECK(d3.instances[1].attributes.at("FN") == "Yes");
    CHECK(d3.false_negatives == 1);
    const std::vector<Point> g{{0, 0}, {1, 0}}, dd{{0.1, 0}};
    const auto best = testkit::exhaustive_match(g, dd, 2.0);
    CHECK(best.matched == 1);
    CHECK(best.cost == doctest::Approx(d3.matches[0].cost));

    auto d4 = derive_fn(scene_of({gt("s", 150, 0), gt("s", 0, 60), gt("s", -139, -49), det("s", 150, 0)}), cfg);
    CHECK(d4.instances.size() == 1);
    CHECK(d4.dropped_ground_truth == 2);
    CHECK(d4.dropped_detections == 1);
  }

  TEST_CASE("derived FN labels use the configured node and states") {
    MatchConfig cfg;
    cfg.fn_node = "Missed";
    cfg.fn_positive = "1";
    cfg.fn_negative = "0";
    auto d = derive_fn(scene_of({gt("s", 0, 0), gt("s", 10, 0), det("s", 0, 0)}), cfg);
    CHECK(d.instances[0].attributes.at("Missed") == "0");
    CHECK(d.instances[1].attributes.at("Missed") == "1");
    CHECK(error_of([] { MatchConfig{-1.0}.validate(); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("greedy matching is one-to-one and below threshold") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int rep = 0; rep < 500; ++rep) {
      std::vector<Point> g(1 + rng() % 10), d(1 + rng() % 10);
      for (auto& p : g) p = {u(rng), u(rng)};
      for (auto& p : d) p = {u(rng), u(rng)};
      const auto m = greedy_match(g, d, 2.0);
      std::set<std::size_t> gs, ds;
      for (const auto& x : m) {
        CHECK(x.cost < 2.0);
        CHECK(gs.insert(x.gt).second);
        CHECK(ds.insert(x.det).second);
      }
    }
  }

  TEST_CASE("scene split sizes and determinism") {
    const auto ten = split_scenes(scenes(10), 0.8, 42);
    CHECK(ten.train.size() == 8);
    CHECK(ten.test.size() == 2);
    std::set<std::string> all(ten.train.begin(), ten.train.end());
    all.insert(ten.test.begin(), ten.test.end());
    CHECK(all.size() == 10);
    const auto again = split_scenes(scenes(10), 0.8, 42);
    CHECK(again.train == ten.train);
    CHECK(again.test == ten.test);
    const auto seven = split_scenes(scenes(7), 0.8, 1);
    CHECK(seven.train.size() == 6);
    CHECK(seven.test.size() == 1);
    CHECK(split_scenes(scenes(10), 0.7, 1).train.size() == 7);
    CHECK(error_of([] { split_scenes(Dataset{}, 0.8, 1); }) == ErrorCode::EmptyDataset);
    CHECK(error_of([] { split_scenes(scenes(3), 1.0, 1); }) == ErrorCode::InvalidConfig);
    SplitAssignment bogus{1, 0.8, {"nope"}, {}};
    CHECK(error_of([&] { apply_split(scenes(3), bogus); }) == ErrorCode::UnknownScene);
  }

  TEST_CASE("dataset and split JSON round-trip") {
    std::mt19937_64 rng(12);
    const auto s = testkit::random_structure(rng, 4);
    const auto d = testkit::random_dataset(s, rng, 60, 6);
    CHECK(dataset_from_json(dataset_to_json(d)) == d);
    const auto a = split_scenes(d, 0.5, 3);
    const auto b = split_from_json(split_to_json(a));
    CHECK(b.seed == a.seed);
    CHECK(b.train == a.train);
    CHECK(b.test == a.test);
  }
}
