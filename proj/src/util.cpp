#include "tcd/error.hpp"
#include "tcd/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tcd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidNodeSpec: return "InvalidNodeSpec";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::ParentConfigMismatch: return "ParentConfigMismatch";
    case ErrorCode::UnseenConfig: return "UnseenConfig";
    case ErrorCode::IncompleteAssignment: return "IncompleteAssignment";
    case ErrorCode::MalformedModel: return "MalformedModel";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownStateLabel: return "UnknownStateLabel";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::UnknownScene: return "UnknownScene";
    case ErrorCode::IncompleteAnnotation: return "IncompleteAnnotation";
    case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorCode::EmptyTrainCorpus: return "EmptyTrainCorpus";
    case ErrorCode::NoSuchEdge: return "NoSuchEdge";
    case ErrorCode::InvalidRefinement: return "InvalidRefinement";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::Io:
    case ErrorCode::InvalidRefinement:
    case ErrorCode::NoSuchEdge:
    case ErrorCode::CyclicGraph:
    case ErrorCode::UnknownNode:
    case ErrorCode::DuplicateNode:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::SelfLoop:
    case ErrorCode::InvalidNodeSpec:
      return true;
    default:
      return false;
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t sample_categorical(std::mt19937_64& rng, std::span<const double> probs) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding left the cumulative sum just below 1.
  return last_positive;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace tcd
