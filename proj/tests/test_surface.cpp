#include <cmath>
#include <limits>
#include <set>

#include <doctest.h>

#include "clab/golden.hpp"
#include "clab/rng.hpp"
#include "clab/surface.hpp"

using namespace clab;

namespace {

double group_norm(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += v[i] * v[i];
  return std::sqrt(s);
}

Dataset tiny_train() { return sample_training({0.3, 123}, 60); }

}  // namespace

TEST_CASE("neuron groups partition the parameter vector") {
  for (int h : {1, 3}) {
    const auto groups = neuron_groups(h, true);
    CHECK(groups.size() == 4 * h + 3);
    std::set<std::size_t> seen;
    std::size_t total = 0;
    for (const auto& g : groups) {
      total += g.size();
      seen.insert(g.begin(), g.end());
    }
    CHECK(total == param_count(h));
    CHECK(seen.size() == param_count(h));  // disjoint and complete
  }
  // without biases the groups only cover the matrix rows
  const auto lean = neuron_groups(3, false);
  std::size_t covered = 0;
  for (const auto& g : lean) covered += g.size();
  CHECK(covered == param_count(3) - 8 * 3 - 3);
}

TEST_CASE("sampled directions are deterministic per seed") {
  const ParamVector center = flatten(build_golden());
  const Direction a = sample_direction(center, 99);
  const Direction b = sample_direction(center, 99);
  const Direction c = sample_direction(center, 100);
  CHECK(a.delta == b.delta);
  CHECK(a.delta != c.delta);
  CHECK(a.normalized);
}

TEST_CASE("directions carry the center's per-group norms") {
  const ParamVector center = flatten(build_golden());
  const Direction d = sample_direction(center, 7);
  for (const auto& g : neuron_groups(center.hidden_size, true)) {
    const double cn = group_norm(center.values, g);
    const double dn = group_norm(d.delta, g);
    if (cn == 0.0)
      CHECK(dn == 0.0);
    else
      CHECK(dn == doctest::Approx(cn).epsilon(1e-12));
  }
}

TEST_CASE("zero-norm groups freeze the direction") {
  // all-zero center: every group is zero, so the direction must vanish
  const ParamVector zero = flatten(LstmParams::zeros(3));
  const Direction d = sample_direction(zero, 5);
  for (double x : d.delta) CHECK(x == 0.0);

  // golden with biases excluded: the input/forget gate groups are all zero
  // (only their biases are set), so e.g. the W_hi rows freeze
  const ParamVector center = flatten(build_golden());
  const Direction lean = sample_direction(center, 5, false);
  const auto groups = neuron_groups(3, false);
  for (std::size_t gi = 0; gi < 6; ++gi)  // i and f gates: 2 gates x 3 units
    for (std::size_t i : groups[gi]) CHECK(lean.delta[i] == 0.0);
}

TEST_CASE("normalization is identity when the direction equals the center") {
  const ParamVector center = flatten(build_golden());
  std::vector<double> d = center.values;
  filter_normalize(d, center, true);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(center.values[i]).epsilon(1e-12));
}

TEST_CASE("normalization is scale invariant") {
  const ParamVector center = flatten(build_golden());
  Direction d = sample_direction(center, 13);
  Rng rng(13);
  std::vector<double> raw(center.values.size());
  for (double& x : raw) x = rng.normal();
  for (double& x : raw) x *= 17.0;
  filter_normalize(raw, center, true);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(raw[i] == doctest::Approx(d.delta[i]).epsilon(1e-12));
}

TEST_CASE("f(0,0) evaluates the center through the same code path") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  const Dataset test = build_test(1, 20);
  SurfaceOptions opt;
  opt.grid = 5;
  const Surface s = explore(g, {ObjectiveKind::CeL1, 0.1}, train, test, 1, 2, opt);
  CHECK(s.value(2, 2) == combined_loss(g, train, {ObjectiveKind::CeL1, 0.1}));
  CHECK(s.center_value == s.value(2, 2));
  CHECK(s.accuracy_at_center == 1.0);
}

TEST_CASE("surfaces are deterministic and parallel-safe") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  const Dataset test = build_test(1, 10);
  SurfaceOptions serial;
  serial.grid = 7;
  SurfaceOptions parallel = serial;
  parallel.jobs = 4;
  const Surface a = explore(g, {ObjectiveKind::CeL2, 0.1}, train, test, 3, 4, serial);
  const Surface b = explore(g, {ObjectiveKind::CeL2, 0.1}, train, test, 3, 4, parallel);
  CHECK(a.values == b.values);
  CHECK(a.min_cell == b.min_cell);
}

TEST_CASE("grid validation") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  SurfaceOptions opt;
  opt.grid = 4;
  CHECK_THROWS_AS(explore(g, {ObjectiveKind::Ce, 0.0}, train, build_test(1, 5), 1, 2, opt), std::invalid_argument);
}

TEST_CASE("a CE slice along alpha matches pointwise evaluation") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  const Dataset test = build_test(1, 10);
  SurfaceOptions opt;
  opt.grid = 5;
  const Surface s = explore(g, {ObjectiveKind::Ce, 0.0}, train, test, 21, 22, opt);
  const Direction d1 = sample_direction(s.center, 21);
  for (int i = 0; i < 5; ++i) {
    std::vector<double> point = s.center.values;
    for (std::size_t k = 0; k < point.size(); ++k) point[k] += s.alphas[i] * d1.delta[k];
    const double expect = combined_loss(unflatten(point, 3), train, {ObjectiveKind::Ce, 0.0});
    CHECK(s.value(i, 2) == expect);
  }
}

TEST_CASE("MDL surfaces carry integer h_bits that jump between cells") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  SurfaceOptions opt;
  opt.grid = 5;
  const Surface s = explore(g, {ObjectiveKind::Mdl, 0.0, 1000}, train, build_test(1, 10), 31, 32, opt);
  REQUIRE(s.h_bits.size() == 25);

  int nonzero_diffs = 0, adjacent = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j + 1 < 5; ++j) {
      ++adjacent;
      nonzero_diffs += s.h_bits[i * 5 + j] != s.h_bits[i * 5 + j + 1];
    }
  CHECK(nonzero_diffs > adjacent / 2);  // jagged along rows
  CHECK(s.h_bits[2 * 5 + 2] == 1303);   // center = golden
}

TEST_CASE("a wider sweep range keeps the MDL minimum at the golden center") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  SurfaceOptions opt;
  opt.grid = 21;
  opt.range = 2.0;
  const Surface s = explore(g, {ObjectiveKind::Mdl, 0.0, 1000}, train, build_test(1, 10), 1, 2, opt);
  CHECK(s.min_at_center());
  CHECK(s.alphas.front() == -2.0);
  CHECK(s.alphas.back() == 2.0);
}

TEST_CASE("L1 and L2 surfaces are finite everywhere around the golden net") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  SurfaceOptions opt;
  opt.grid = 7;
  for (ObjectiveKind kind : {ObjectiveKind::CeL1, ObjectiveKind::CeL2}) {
    const Surface s = explore(g, {kind, 0.1}, train, build_test(1, 10), 5, 6, opt);
    for (double v : s.values) CHECK(std::isfinite(v));
  }
}

TEST_CASE("non-finite losses become +infinity cells instead of aborting") {
  LstmParams p = LstmParams::zeros(2);
  const double big = std::numeric_limits<double>::max();
  for (int k = 0; k < 2; ++k) {
    p.b_ii[k] = 127.0;
    p.b_ig[k] = -127.0;
    p.b_io[k] = 127.0;
    p.w_out(0, k) = big;  // the # logit overflows to -inf
  }
  Dataset d;
  d.samples = {{1}};
  SurfaceOptions opt;
  opt.grid = 3;
  const Surface s = explore(p, {ObjectiveKind::Ce, 0.0}, d, d, 8, 9, opt);
  CHECK(std::isinf(s.value(1, 1)));
}

TEST_CASE("CSV and summary are stable and well-formed") {
  const LstmParams g = build_golden();
  const Dataset train = tiny_train();
  SurfaceOptions opt;
  opt.grid = 3;
  const Surface s = explore(g, {ObjectiveKind::Mdl, 0.0, 1000}, train, build_test(1, 5), 7, 11, opt);
  const std::string csv1 = surface_csv(s);
  const std::string csv2 = surface_csv(s);
  CHECK(csv1 == csv2);
  CHECK(csv1.substr(0, 26) == "alpha,beta,loss,h_bits\n-1,");
  const std::string summary = surface_summary_json(s);
  CHECK(summary.find("\"min_at_center\"") != std::string::npos);
  CHECK(summary.find("\"seeds\"") != std::string::npos);
}
