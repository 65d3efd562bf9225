#include "testkit.hpp"

#include "tcd/report_io.hpp"

#include <doctest.h>

using namespace tcd;

namespace {

SceneReport scene(std::string id, double n_alpha, std::size_t n, double alpha) {
  return {std::move(id), n, n_alpha, is_relevant(n_alpha, n, alpha), {}};
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("scene table is rarest first") {
    RunReport r;
    r.alpha = 0.05;
    r.target_nodes = {"FN"};
    r.scenes = {scene("B", 0.2, 10, 0.05), scene("A", 1.5, 10, 0.05)};
    for (const auto& s : r.scenes) r.rss += s.relevant;
    r.rss_fraction = 0.5;
    CHECK(r.rss == 1);
    const auto text = render_run_summary(r);
    CHECK(text.find("\nA ") < text.find("\nB "));
    CHECK(text.find("RSS = 1 of 2") != std::string::npos);
    CHECK(render_report(run_report_to_json(r)) == text);
  }

  TEST_CASE("empty test set") {
    RunReport r;
    r.target_nodes = {"FN"};
    const auto text = render_run_summary(r);
    CHECK(text.find("RSS = 0 of 0") != std::string::npos);
  }

  TEST_CASE("run report JSON round-trip") {
    RunReport r;
    r.alpha = 0.1;
    r.target_nodes = {"FN", "Occlusion"};
    r.model_fingerprint = "abc";
    r.split_seed = 7;
    r.scenes = {scene("x", 0.75, 4, 0.1)};
    r.scenes[0].details.push_back({0, "FN", 0.25, {0.0, 0.2}, 0.75});
    r.rss = 1;
    r.rss_fraction = 1.0;
    const auto back = run_report_from_json(run_report_to_json(r));
    CHECK(back.rss == 1);
    CHECK(back.split_seed == 7);
    CHECK(back.scenes[0].details[0].range == PValueRange{0.0, 0.2});
    CHECK(run_report_to_json(back) == run_report_to_json(r));
    CHECK(testkit::error_of([] { run_report_from_json({{"kind", "validation"}}); }) == ErrorCode::MalformedReport);
  }

  TEST_CASE("per-seed distribution line") {
    ValidationReport v;
    v.node = "FN";
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ValidationIteration it;
      it.seed = seed;
      it.rss_initial = 20;
      it.rss_after = 10 + seed;
      it.test_scenes = 50;
      it.relative_change = relative_rss_change(20, static_cast<double>(it.rss_after));
      it.proposition = proposition_for(20, static_cast<double>(it.rss_after));
      v.iterations.push_back(it);
    }
    v.rss_initial = 20;
    v.rss_after = 15.5;
    v.relative_rss_change = relative_rss_change(20, 15.5);
    v.proposition = Proposition::Valid;
    const auto text = render_validation_summary(v);
    CHECK(text.find("RSS_after per seed: n=10 min=11.00 median=15.50 max=20.00") != std::string::npos);
    const auto back = validation_report_from_json(validation_report_to_json(v));
    CHECK(back.valid_count() == 9);
    CHECK(render_report(validation_report_to_json(v)) == text);
  }
}
