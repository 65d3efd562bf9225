#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tcd {

// 64-bit FNV-1a. Used for content fingerprints written into reports.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// SplitMix64 finalizer; derives independent sub-seeds from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// Uniform draw in [0, 1) using the top 53 bits of one engine output. The
// standard distributions are implementation-defined; these helpers keep
// seeded output identical across standard libraries.
double uniform01(std::mt19937_64& rng);

// Unbiased integer in [0, bound) by rejection.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound);

// Standard normal via Box-Muller (one value per call).
double standard_normal(std::mt19937_64& rng);

// Index of the category selected by a uniform draw over `probs`.
std::size_t sample_categorical(std::mt19937_64& rng, std::span<const double> probs);

template <typename T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Median of a sample (mean of the two middle values for even sizes).
double median(std::vector<double> values);

}  // namespace tcd
