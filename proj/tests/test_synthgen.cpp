#include "testkit.hpp"

#include "tcd/annotations.hpp"
#include "tcd/model_io.hpp"
#include "tcd/synthgen.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace tcd;
using testkit::error_of;

namespace {

// X -> FN with Pr(FN=Yes) = 0.5 * 0.04 + 0.5 * 0.16 = 0.1.
BnModel ten_percent_model() {
  const auto s = build_structure({{"X", {"a", "b"}}, {"FN", {"No", "Yes"}}}, {{"X", "FN"}});
  return BnModel(s,
                 {Cbt::from_rows(s, 0, {{{}, {0.5, 0.5}, {}}}, ZeroCountPolicy::Strict),
                  Cbt::from_rows(s, 1, {{{{"X", "a"}}, {0.96, 0.04}, {}}, {{{"X", "b"}}, {0.84, 0.16}, {}}},
                                 ZeroCountPolicy::Strict)},
                 ZeroCountPolicy::Strict);
}

GeneratorConfig hidden_config(std::uint64_t seed) {
  GeneratorConfig cfg(load_model(testkit::data_dir() / "traffic_density.model"));
  cfg.scenes = 50;
  cfg.min_instances = 3;
  cfg.max_instances = 12;
  cfg.scene_level_nodes = {"Weather", "RoadCondition", "Illumination", "Reflection", "TrafficDensity"};
  cfg.instance_level_nodes = {"Truncation", "Occlusion", "FN"};
  cfg.hidden_nodes = {"TrafficDensity"};
  cfg.seed = seed;
  return cfg;
}

std::string csv(const GeneratedData& g) {
  std::ostringstream os;
  write_records(os, g.records);
  return os.str();
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("FN marginal matches the truth model") {
    const auto model = ten_percent_model();
    double marginal = 0.0;
    for (const char* x : {"a", "b"}) marginal += model.joint_prob({{"X", x}, {"FN", "Yes"}});
    CHECK(marginal == doctest::Approx(0.1));

    GeneratorConfig cfg(model);
    cfg.scenes = 1000;
    cfg.min_instances = cfg.max_instances = 5;
    cfg.instance_level_nodes = {"X", "FN"};
    cfg.seed = 17;
    const auto data = derive_dataset(group_records(generate(cfg).records), MatchConfig{});
    std::size_t yes = 0;
    for (const auto& s : data.scenes) {
      for (const auto& i : s.instances) yes += i.attributes.at("FN") == "Yes";
    }
    CHECK(data.instance_count() == 5000);
    const double rate = static_cast<double>(yes) / 5000.0;
    CHECK(std::abs(rate - marginal) <= 0.02);
  }

  TEST_CASE("seeded output is byte-identical") {
    const auto a = csv(generate(hidden_config(5)));
    CHECK(a == csv(generate(hidden_config(5))));
    CHECK(a != csv(generate(hidden_config(6))));
  }

  TEST_CASE("hidden node is withheld and restored by the sidecar") {
    const auto cfg = hidden_config(9);
    const auto gen = generate(cfg);
    for (const auto& r : gen.records) {
      CHECK(r.attributes.count("TrafficDensity") == 0);
      CHECK(r.attributes.count("FN") == 0);
      CHECK(std::abs(r.x) < cfg.x_limit);
      CHECK(std::abs(r.y) < cfg.y_limit);
    }
    const auto data = dataset_from_ground_truth(group_records(gen.records), MatchConfig{});
    const auto restored = import_annotations(truth_sidecar(cfg, gen), data);
    const auto& s = cfg.truth_model.structure();
    const NodeId td = s.id_of("TrafficDensity");
    REQUIRE(restored.scenes.size() == gen.truth.size());
    for (std::size_t k = 0; k < gen.truth.size(); ++k) {
      const auto& scene = restored.scenes[k];
      REQUIRE(scene.instances.size() == gen.truth[k].states.size());
      for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        CHECK(scene.instances[i].attributes.at("TrafficDensity") == s.node(td).states[gen.truth[k].states[i][td]]);
      }
      // Scene-level: one value per scene.
      CHECK(scene.instances.front().attributes.at("TrafficDensity") ==
            scene.instances.back().attributes.at("TrafficDensity"));
    }
  }

  TEST_CASE("no hidden nodes, empty sidecar") {
    auto cfg = hidden_config(1);
    cfg.hidden_nodes.clear();
    CHECK(truth_sidecar(cfg, generate(cfg)).empty());
  }

  TEST_CASE("config checks") {
    auto cfg = hidden_config(1);
    cfg.instance_level_nodes.pop_back();
    CHECK(error_of([&] { generate(cfg); }) == ErrorCode::InvalidConfig);
    cfg = hidden_config(1);
    cfg.scene_level_nodes = {"Weather", "RoadCondition", "Reflection", "TrafficDensity"};
    cfg.instance_level_nodes = {"Illumination", "Truncation", "Occlusion", "FN"};
    CHECK(error_of([&] { generate(cfg); }) == ErrorCode::InvalidConfig);
    cfg = hidden_config(1);
    cfg.hidden_nodes = {"FN"};
    CHECK(error_of([&] { generate(cfg); }) == ErrorCode::InvalidConfig);
  }
}
