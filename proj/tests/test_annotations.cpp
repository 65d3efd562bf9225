#include "testkit.hpp"

#include "tcd/annotations.hpp"

#include <doctest.h>

using namespace tcd;
using testkit::error_of;

namespace {

Dataset sample() {
  Dataset d;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "s" + std::to_string(i);
    d.scenes.push_back({id, {{id, 1.0 * i, 0.0, {{"FN", "No"}}}, {id, 2.0 * i, 1.0, {{"FN", "Yes"}}}}});
  }
  return d;
}

const std::vector<std::string> kDensity{"low", "medium", "high", "very_high"};

}  // namespace

TEST_SUITE("annotations") {
  TEST_CASE("export writes blank records") {
    const auto a = export_annotations(sample(), {"s0", "s2", "s3"});
    REQUIRE(a.scenes.size() == 3);
    CHECK(a.node.empty());
    for (const auto& s : a.scenes) {
      CHECK(s.verdict == Verdict::Unset);
      CHECK(s.state.empty());
      CHECK(s.instances.size() == 2);
      CHECK(s.instances[1].summary.at("FN") == "Yes");
    }
    CHECK(error_of([] { export_annotations(sample(), {"zz"}); }) == ErrorCode::UnknownScene);
  }

  TEST_CASE("import with a default state") {
    Annotation a;
    a.node = "TrafficDensity";
    a.states = kDensity;
    a.default_state = "low";
    a.scenes.push_back({"s1", Verdict::TriggeringCondition, "high", {}});
    a.scenes.push_back({"s2", Verdict::TriggeringCondition, "medium", {{1, 0, 0, {}, "very_high"}}});
    const auto d = import_annotations(a, sample());
    for (const auto& s : d.scenes) {
      for (const auto& inst : s.instances) CHECK(inst.attributes.count("TrafficDensity") == 1);
    }
    CHECK(d.scenes[0].instances[0].attributes.at("TrafficDensity") == "low");
    CHECK(d.scenes[1].instances[1].attributes.at("TrafficDensity") == "high");
    CHECK(d.scenes[2].instances[0].attributes.at("TrafficDensity") == "medium");
    CHECK(d.scenes[2].instances[1].attributes.at("TrafficDensity") == "very_high");
  }

  TEST_CASE("import errors") {
    Annotation a;
    a.node = "TrafficDensity";
    a.states = kDensity;
    a.scenes.push_back({"ghost", Verdict::Unset, "low", {}});
    CHECK(error_of([&] { import_annotations(a, sample()); }) == ErrorCode::UnknownScene);
    a.scenes = {{"s0", Verdict::Unset, "low", {}}};
    CHECK(error_of([&] { import_annotations(a, sample()); }) == ErrorCode::IncompleteAnnotation);
    a.default_state = "low";
    a.scenes = {{"s0", Verdict::Unset, "jammed", {}}};
    CHECK(error_of([&] { import_annotations(a, sample()); }) == ErrorCode::UnknownStateLabel);
    a.node = "FN";
    a.scenes.clear();
    CHECK(error_of([&] { import_annotations(a, sample()); }) == ErrorCode::MalformedAnnotation);
  }

  TEST_CASE("JSON round-trip") {
    Annotation a = export_annotations(sample(), {"s1"});
    a.node = "TrafficDensity";
    a.states = kDensity;
    a.default_state = "low";
    a.scenes[0].verdict = Verdict::RandomOccurrence;
    a.scenes[0].state = "high";
    const auto back = annotations_from_json(annotation_to_json(a));
    REQUIRE(back.size() == 1);
    CHECK(import_annotations(back[0], sample()) == import_annotations(a, sample()));
    CHECK(back[0].scenes[0].verdict == Verdict::RandomOccurrence);
    const auto many = annotations_from_json(annotations_to_json({a, a}));
    CHECK(many.size() == 2);
  }
}
