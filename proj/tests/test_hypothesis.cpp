#include "testkit.hpp"

#include "tcd/hypothesis.hpp"
#include "tcd/learning.hpp"

#include <doctest.h>

#include <random>

using namespace tcd;
using testkit::error_of;

TEST_SUITE("hypothesis") {
  TEST_CASE("CBL is the realized theta") {
    const auto s = testkit::baseline_structure();
    Dataset d;
    d.scenes.push_back({"s", {}});
    for (int i = 0; i < 10; ++i) {
      d.scenes[0].instances.push_back(
          {"s", 0, 0,
           {{"Weather", "Clear"}, {"RoadCondition", "Dry"}, {"Illumination", "Bright"}, {"Reflection", "High"},
            {"Truncation", "Yes"}, {"Occlusion", "LargelyOccluded"}, {"FN", i < 3 ? "Yes" : "No"}}});
    }
    const auto m = learn_cbts(s, d);
    const auto cbls = assign_cbls(m, d, {"FN"});
    REQUIRE(cbls.size() == 10);
    CHECK(cbls[0].cbl == 0.3);
    CHECK(cbls[5].cbl == 0.7);
    // Weather is always Clear: a certain table.
    for (const auto& a : assign_cbls(m, d, {"Weather"})) CHECK(a.cbl == 1.0);
  }

  TEST_CASE("one assignment per instance and target") {
    std::mt19937_64 rng(2);
    const auto s = testkit::random_structure(rng, 4);
    const auto d = testkit::random_dataset(s, rng, 50, 7);
    const auto m = learn_cbts(s, d);
    const auto cbls = assign_cbls(m, d, {s.node(0).name, s.node(3).name});
    CHECK(cbls.size() == 100);
    CHECK(cbls[0].node == s.node(0).name);
    CHECK(cbls[1].node == s.node(3).name);
    CHECK(cbls[0].instance == cbls[1].instance);
  }

  TEST_CASE("p-value ranges") {
    const std::vector<double> train{0.1, 0.2, 0.2, 0.5};
    CHECK(pvalue_range(0.2, train) == PValueRange{0.2, 0.8});
    CHECK(pvalue_range(0.05, train) == PValueRange{0.0, 0.2});
    CHECK(pvalue_range(0.9, train) == PValueRange{0.8, 1.0});
    const TrainCorpus corpus(train);
    CHECK(corpus.count_lower(0.2) == 1);
    CHECK(corpus.count_equal(0.2) == 2);
    CHECK(error_of([] { TrainCorpus().range(0.5); }) == ErrorCode::EmptyTrainCorpus);
  }

  TEST_CASE("significance branches") {
    CHECK(significance({0.06, 0.10}, 0.05) == 0.0);
    CHECK(significance({0.01, 0.04}, 0.05) == 1.0);
    CHECK(significance({0.04, 0.06}, 0.05) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(significance({0.05, 0.10}, 0.05) == 0.0);
    CHECK(significance({0.01, 0.05}, 0.05) == 1.0);
  }

  TEST_CASE("scene relevance") {
    CHECK(is_relevant(1.5, 10, 0.05));
    CHECK_FALSE(is_relevant(0.0, 10, 0.05));
    CHECK_FALSE(is_relevant(0.5, 10, 0.05));
    CHECK_FALSE(is_relevant(0.0, 0, 0.05));
  }

  TEST_CASE("scoring is identical serial and parallel") {
    std::mt19937_64 rng(4);
    const auto s = testkit::random_structure(rng, 5);
    const auto train = testkit::random_dataset(s, rng, 400, 40);
    const auto test = testkit::random_dataset(s, rng, 200, 30);
    const auto m = learn_cbts(s, train);
    const AnalysisConfig cfg{0.1, {s.node(s.topological_order().back()).name}};
    const auto a = score_scenes(m, train, test, cfg, Execution::Serial);
    const auto b = score_scenes(m, train, test, cfg, Execution::Parallel);
    CHECK(a.rss == b.rss);
    REQUIRE(a.scenes.size() == b.scenes.size());
    for (std::size_t i = 0; i < a.scenes.size(); ++i) {
      CHECK(a.scenes[i].scene_id == b.scenes[i].scene_id);
      CHECK(a.scenes[i].n_significant == b.scenes[i].n_significant);
      CHECK(a.scenes[i].n_total == b.scenes[i].n_total);
    }
    std::size_t rss = 0;
    for (const auto& sc : a.scenes) {
      double sum = 0.0;
      for (const auto& det : sc.details) sum += det.n_alpha;
      CHECK(sum == doctest::Approx(sc.n_significant));
      CHECK(sc.relevant == is_relevant(sc.n_significant, sc.n_total, cfg.alpha));
      rss += sc.relevant;
    }
    CHECK(a.rss == rss);
  }

  TEST_CASE("invalid analysis config") {
    CHECK(error_of([] { AnalysisConfig{0.0, {"FN"}}.validate(); }) == ErrorCode::InvalidConfig);
    CHECK(error_of([] { AnalysisConfig{0.05, {}}.validate(); }) == ErrorCode::InvalidConfig);
  }
}
