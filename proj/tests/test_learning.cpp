#include "testkit.hpp"

#include "tcd/kernels.hpp"
#include "tcd/learning.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace tcd;
using testkit::error_of;

namespace {

ObjectInstance obj(Assignment a) { return ObjectInstance{"s", 0.0, 0.0, std::move(a)}; }

Dataset one_scene(std::vector<ObjectInstance> objs) {
  Dataset d;
  d.scenes.push_back({"s", std::move(objs)});
  return d;
}

Assignment baseline_row(const std::string& fn) {
  return {{"Weather", "Clear"}, {"RoadCondition", "Dry"}, {"Illumination", "Bright"}, {"Reflection", "High"},
          {"Truncation", "Yes"}, {"Occlusion", "LargelyOccluded"}, {"FN", fn}};
}

}  // namespace

TEST_SUITE("learning") {
  TEST_CASE("maximum likelihood on stated counts") {
    std::vector<ObjectInstance> objs;
    for (int i = 0; i < 10; ++i) objs.push_back(obj(baseline_row(i < 3 ? "Yes" : "No")));
    const auto m = learn_cbts(testkit::baseline_structure(), one_scene(objs));
    const ParentConfig u{{"Occlusion", "LargelyOccluded"}, {"Reflection", "High"}, {"Truncation", "Yes"}};
    CHECK(m.conditional_prob("FN", "Yes", u) == 0.3);
    const auto& cbt = m.cbt("FN");
    CHECK(cbt.support(cbt.row_of(u)) == 10);
  }

  TEST_CASE("root marginal frequency") {
    const auto s = build_structure({{"Weather", {"Clear", "Rain"}}}, {});
    std::vector<ObjectInstance> objs;
    for (int i = 0; i < 20; ++i) objs.push_back(obj({{"Weather", i < 5 ? "Rain" : "Clear"}}));
    CHECK(learn_cbts(s, one_scene(objs)).conditional_prob("Weather", "Rain", {}) == 0.25);
  }

  TEST_CASE("unseen parent configuration") {
    const auto s = build_structure({{"P", {"p0", "p1"}}, {"C", {"c0", "c1"}}}, {{"P", "C"}});
    const auto data = one_scene({obj({{"P", "p0"}, {"C", "c1"}})});
    const auto uni = learn_cbts(s, data, {ZeroCountPolicy::Uniform});
    CHECK(uni.conditional_prob("C", "c0", {{"P", "p1"}}) == 0.5);
    CHECK(uni.conditional_prob("C", "c1", {{"P", "p1"}}) == 0.5);
    CHECK(uni.cbt("C").support(1) == 0);
    const auto strict = learn_cbts(s, data, {ZeroCountPolicy::Strict});
    CHECK_FALSE(strict.cbt("C").has_row(1));
    CHECK(error_of([&] { strict.conditional_prob("C", "c0", {{"P", "p1"}}); }) == ErrorCode::UnseenConfig);
  }

  TEST_CASE("tables equal a brute-force tally") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const auto s = testkit::random_structure(rng, 5);
      const auto data = testkit::random_dataset(s, rng, 200, 10);
      const auto m = learn_cbts(s, data, {ZeroCountPolicy::Strict});
      for (const auto& spec : s.nodes()) {
        const auto t = testkit::tally(s, data, spec.name);
        const auto& cbt = m.cbt(spec.name);
        std::size_t present = 0;
        for (std::size_t r = 0; r < cbt.row_count(); ++r) present += cbt.has_row(r);
        CHECK(present == t.size());
        for (const auto& [u, counts] : t) {
          std::uint64_t support = 0;
          for (const auto& [x, n] : counts) support += n;
          const std::size_t row = cbt.row_of(u);
          REQUIRE(cbt.has_row(row));
          CHECK(cbt.support(row) == support);
          for (const auto& label : spec.states) {
            const std::uint64_t n = counts.count(label) ? counts.at(label) : 0;
            const StateId x = spec.state_index(label);
            CHECK(cbt.count(row, x) == n);
            CHECK(cbt.theta(row, x) == static_cast<double>(n) / static_cast<double>(support));
          }
        }
      }
    }
  }

  TEST_CASE("learned tables maximize the likelihood") {
    std::mt19937_64 rng(9);
    const auto s = testkit::random_structure(rng, 5);
    const auto data = testkit::random_dataset(s, rng, 200, 10);
    const auto m = learn_cbts(s, data, {ZeroCountPolicy::Uniform});
    const double best = log_likelihood(m, data);
    REQUIRE(std::isfinite(best));
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<Cbt> cbts;
      for (const auto& cbt : m.cbts()) {
        auto rows = cbt.rows();
        for (auto& row : rows) {
          row.counts.reset();
          double sum = 0.0;
          for (auto& p : row.probabilities) {
            p = 0.8 * p + 0.2 * u(rng);
            sum += p;
          }
          for (auto& p : row.probabilities) p /= sum;
        }
        cbts.push_back(Cbt::from_rows(s, cbt.child_id(), rows, ZeroCountPolicy::Uniform));
      }
      const BnModel other(s, std::move(cbts), ZeroCountPolicy::Uniform);
      CHECK(log_likelihood(other, data) <= best + 1e-9);
    }
  }

  TEST_CASE("log-likelihood edge cases") {
    const auto s = build_structure({{"R", {"a", "b"}}}, {});
    const BnModel m(s, {Cbt::from_rows(s, 0, {{{}, {1.0, 0.0}, {}}}, ZeroCountPolicy::Strict)}, ZeroCountPolicy::Strict);
    CHECK(log_likelihood(m, one_scene({obj({{"R", "b"}})})) == -std::numeric_limits<double>::infinity());
    CHECK(log_likelihood(m, Dataset{}) == 0.0);
  }

  TEST_CASE("missing attribute and unknown label") {
    const auto s = build_structure({{"R", {"a", "b"}}}, {});
    CHECK(error_of([&] { learn_cbts(s, one_scene({obj({})})); }) == ErrorCode::MissingAttribute);
    CHECK(error_of([&] { learn_cbts(s, one_scene({obj({{"R", "c"}})})); }) == ErrorCode::UnknownStateLabel);
  }

  TEST_CASE("serial and parallel family counts agree") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
      const auto s = testkit::random_structure(rng, 6);
      const auto data = testkit::random_dataset(s, rng, 3000, 50);
      const auto enc = encode(data, s);
      CHECK(count_families(s, enc, Execution::Serial) == count_families(s, enc, Execution::Parallel));
      const auto m = learn_cbts(s, data);
      for (NodeId id = 0; id < s.size(); ++id) {
        CHECK(compute_cbls(m, id, enc, Execution::Serial) == compute_cbls(m, id, enc, Execution::Parallel));
      }
    }
  }
}
