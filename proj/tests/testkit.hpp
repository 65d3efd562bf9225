#pragma once

// Fixtures and independent reference implementations for the test
// binaries. The oracles here deliberately avoid the library's encoded
// kernels: they work on labels and plain loops.

#include "tcd/bn.hpp"
#include "tcd/dataset.hpp"
#include "tcd/error.hpp"
#include "tcd/hypothesis.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tcd::testkit {

std::filesystem::path data_dir();
BnStructure baseline_structure();
BnModel baseline_model();

// Random forward DAG over `nodes` nodes whose names do not sort in
// topological order; 2 or 3 states each.
BnStructure random_structure(std::mt19937_64& rng, std::size_t nodes, double edge_prob = 0.4);
// States drawn uniformly and independently, instances spread over `scenes`.
Dataset random_dataset(const BnStructure& s, std::mt19937_64& rng, std::size_t instances, std::size_t scenes);

template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Parent config -> child state -> count, from the raw labels.
using Tally = std::map<ParentConfig, std::map<std::string, std::uint64_t>>;
Tally tally(const BnStructure& s, const Dataset& data, const std::string& node);

PValueRange naive_pvalue(double test, const std::vector<double>& train);
double naive_significance(const PValueRange& p, double alpha);

struct ExhaustiveMatch {
  std::size_t matched = 0;
  double cost = 0.0;
};
// Maximum number of pairs below the threshold, then minimum total cost.
ExhaustiveMatch exhaustive_match(const std::vector<Point>& gt, const std::vector<Point>& det, double threshold);
// Greedy rule by repeated full scans.
std::vector<Match> naive_greedy(const std::vector<Point>& gt, const std::vector<Point>& det, double threshold);

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

// Property checks over seeded random cases.
CheckResult check_dag_validation(std::uint64_t seed, std::size_t cases);
CheckResult check_cbt_normalization(std::uint64_t seed, std::size_t cases);
CheckResult check_prange_width(std::uint64_t seed, std::size_t cases);
CheckResult check_significance_monotone(std::uint64_t seed, std::size_t cases);
CheckResult check_rss_permutation(std::uint64_t seed, std::size_t cases);
CheckResult check_split_partition(std::uint64_t seed, std::size_t cases);
// GT objects at least 4 m apart (the generator's placement rule).
CheckResult check_matching_separated(std::uint64_t seed, std::size_t cases);
// Arbitrary positions in an 8 m square.
CheckResult check_matching_unconstrained(std::uint64_t seed, std::size_t cases);

std::vector<CheckResult> invariant_checks(std::uint64_t seed);

}  // namespace tcd::testkit
