#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "clab/lstm.hpp"

namespace clab {

/// S -> aSb (1-p) | eps (p); string lengths are geometric in n.
struct GrammarConfig {
  double p = 0.3;
  std::uint64_t seed = 0;
};

/// One string "# a^n b^n #" (2n+2 tokens). Only n is stored; the token
/// sequence is materialized on demand.
struct StringSample {
  int n = 0;

  std::vector<Symbol> tokens() const;
  int token_count() const { return 2 * n + 2; }

  bool operator==(const StringSample&) const = default;
};

struct Dataset {
  std::vector<StringSample> samples;
  std::vector<double> weights;  // empty => uniform

  bool weighted() const { return !weights.empty(); }
  std::size_t size() const { return samples.size(); }

  bool operator==(const Dataset&) const = default;
};

/// Largest n present; -1 for an empty dataset.
int max_n(const Dataset& data);

/// Aggregates samples by n: (n, total mass) with mass = count for uniform
/// datasets and summed weight otherwise. Loss evaluation walks this instead
/// of the raw sample list; identical strings are only simulated once.
std::vector<std::pair<int, double>> grouped_mass(const Dataset& data);

/// `size` i.i.d. draws of n with P(n) = p(1-p)^n; uniform weights.
Dataset sample_training(const GrammarConfig& cfg, int size);

/// One sample for each n in [max_n(train)+1, max_n(train)+count], weighted
/// by the grammar law renormalized over that range.
Dataset build_validation(const Dataset& train, int count, const GrammarConfig& cfg);

/// One sample per n in [n_min, n_max], uniform weights.
Dataset build_test(int n_min, int n_max);

// File format: one sample per line, tokens as characters from {#,a,b},
// optional tab-separated weight column.
void save_dataset(const Dataset& data, const std::filesystem::path& file);
Dataset load_dataset(const std::filesystem::path& file);

}  // namespace clab
