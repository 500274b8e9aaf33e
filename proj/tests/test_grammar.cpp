#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "clab/grammar.hpp"

using namespace clab;

TEST_CASE("sampling is reproducible per seed") {
  const GrammarConfig cfg{0.3, 42};
  CHECK(sample_training(cfg, 500) == sample_training(cfg, 500));
  CHECK(sample_training(cfg, 500) != sample_training({0.3, 43}, 500));
}

TEST_CASE("sampled n follows the geometric law") {
  const int size = 100000;
  const Dataset data = sample_training({0.3, 9}, size);

  double mean = 0.0;
  int zeros = 0;
  for (const StringSample& s : data.samples) {
    mean += s.n;
    zeros += s.n == 0;
  }
  mean /= size;

  // E[n] = (1-p)/p, sd of the sample mean = sqrt((1-p)/p^2/N)
  const double expect = 0.7 / 0.3;
  const double sigma = std::sqrt(0.7 / 0.09 / size);
  CHECK(std::fabs(mean - expect) < 3 * sigma);

  // P(n = 0) = p within 3 binomial sigmas
  const double p0 = static_cast<double>(zeros) / size;
  const double sigma0 = std::sqrt(0.3 * 0.7 / size);
  CHECK(std::fabs(p0 - 0.3) < 3 * sigma0);
}

TEST_CASE("a 950-draw training set has a plausible maximum n") {
  const Dataset data = sample_training({0.3, 4}, 950);
  const int m = max_n(data);
  CHECK(m >= 10);  // order of magnitude only; the cited run saw 21
  CHECK(m <= 45);
}

TEST_CASE("a degenerate grammar produces empty strings") {
  const Dataset data = sample_training({0.999, 1}, 200);
  int zeros = 0;
  for (const StringSample& s : data.samples) zeros += s.n == 0;
  CHECK(zeros >= 198);
  CHECK(data.samples[0].tokens().size() == 2);  // "##"
}

TEST_CASE("validation covers the n-range right after the training set") {
  Dataset train;
  train.samples = {{3}, {21}, {0}};
  const Dataset val = build_validation(train, 50, {0.3, 0});
  REQUIRE(val.size() == 50);
  CHECK(val.samples.front().n == 22);
  CHECK(val.samples.back().n == 71);

  double sum = 0.0;
  for (double w : val.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // geometric ratio between consecutive weights
  CHECK(val.weights[1] / val.weights[0] == doctest::Approx(0.7).epsilon(1e-12));

  const Dataset one = build_validation(train, 1, {0.3, 0});
  REQUIRE(one.size() == 1);
  CHECK(one.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("test sets enumerate n exactly once each") {
  const Dataset t = build_test(1, 1500);
  REQUIRE(t.size() == 1500);
  long long tokens = 0, positions = 0;
  for (const StringSample& s : t.samples) {
    tokens += s.token_count();
    positions += s.token_count() - 1;  // prediction targets per string
  }
  CHECK(tokens == 2254500);
  CHECK(positions == 2253000);

  const Dataset single = build_test(5, 5);
  REQUIRE(single.size() == 1);
  std::string str;
  for (Symbol sym : single.samples[0].tokens()) str.push_back(symbol_char(sym));
  CHECK(str == "#aaaaabbbbb#");

  const Dataset small = build_test(1, 3);
  REQUIRE(small.size() == 3);
  CHECK(small.samples[0].tokens().size() == 4);
  CHECK(small.samples[1].tokens().size() == 6);
  CHECK(small.samples[2].tokens().size() == 8);

  CHECK_THROWS_AS(build_test(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_test(7, 5), std::invalid_argument);
}

TEST_CASE("datasets round-trip through their file format") {
  const auto dir = std::filesystem::temp_directory_path() / "clab_grammar_test";
  std::filesystem::create_directories(dir);

  const Dataset train = sample_training({0.3, 77}, 200);
  save_dataset(train, dir / "train.txt");
  CHECK(load_dataset(dir / "train.txt") == train);

  const Dataset val = build_validation(train, 20, {0.3, 77});
  save_dataset(val, dir / "val.txt");
  const Dataset loaded = load_dataset(dir / "val.txt");
  REQUIRE(loaded.size() == val.size());
  CHECK(loaded.samples == val.samples);
  for (std::size_t i = 0; i < val.weights.size(); ++i)
    CHECK(loaded.weights[i] == val.weights[i]);  // %.17g round-trips doubles

  std::filesystem::remove_all(dir);
}

TEST_CASE("the loader rejects malformed lines") {
  const auto dir = std::filesystem::temp_directory_path() / "clab_grammar_bad";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "bad.txt");
    out << "#aabbb#\n";
  }
  CHECK_THROWS(load_dataset(dir / "bad.txt"));
  {
    std::ofstream out(dir / "bad2.txt");
    out << "aabb\n";
  }
  CHECK_THROWS(load_dataset(dir / "bad2.txt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("grouped_mass aggregates duplicates") {
  Dataset d;
  d.samples = {{2}, {0}, {2}, {5}};
  const auto groups = grouped_mass(d);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == std::pair<int, double>{0, 1.0});
  CHECK(groups[1] == std::pair<int, double>{2, 2.0});
  CHECK(groups[2] == std::pair<int, double>{5, 1.0});

  d.weights = {0.25, 0.25, 0.25, 0.25};
  const auto weighted = grouped_mass(d);
  CHECK(weighted[1].second == doctest::Approx(0.5).epsilon(1e-15));
}
