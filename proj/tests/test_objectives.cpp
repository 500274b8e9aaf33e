#include <cmath>
#include <limits>

#include <doctest.h>

#include "clab/codec.hpp"
#include "clab/golden.hpp"
#include "clab/objectives.hpp"
#include "clab/rng.hpp"

using namespace clab;

namespace {

Dataset single(int n) {
  Dataset d;
  d.samples = {{n}};
  return d;
}

/// Golden with the end-of-phase switch moved one counter step up: predicts #
/// already at c2 = 1, i.e. one position early (at the b_n target).
LstmParams leaky_golden() {
  LstmParams g = build_golden();
  g.b_out[0] = 17.2;
  g.w_out(0, 0) = -40.0;
  g.w_out(0, 1) = -40.0;
  g.w_out(0, 2) = -20.0;
  return g;
}

/// Constant head: always predicts b, regardless of input.
LstmParams always_b() {
  LstmParams p = LstmParams::zeros(3);
  p.b_out = {0.0, 0.0, 10.0};
  return p;
}

constexpr double kBernoulliEntropy = 0.6108643020548935;  // -(0.3 ln 0.3 + 0.7 ln 0.7)

}  // namespace

TEST_CASE("uniform-output network pays ln 3 per token") {
  const double ce = ce_mean(LstmParams::zeros(2), single(1));  // "#ab#", 3 targets
  CHECK(ce == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("golden CE matches the reported value and the analytic oracle") {
  const LstmParams g = build_golden();
  const Dataset train = sample_training({0.3, 2024}, 950);
  const double ce = ce_mean(g, train);
  CHECK(ce == doctest::Approx(0.358).epsilon(0.06));  // 0.358 +- 0.02

  // analytic oracle: H(p) * (E[n]+1) / (2 E[n]+1) at the sample's empirical mean
  double mean_n = 0.0;
  for (const auto& s : train.samples) mean_n += s.n;
  mean_n /= static_cast<double>(train.size());
  const double oracle = kBernoulliEntropy * (mean_n + 1.0) / (2.0 * mean_n + 1.0);
  CHECK(ce == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("golden deterministic positions contribute almost nothing") {
  const LstmParams g = build_golden();
  // n=1: the only deterministic position is the final # after b_1
  const auto one = run_sequence(g, StringSample{1}.tokens());
  CHECK(-std::log(one[2][0]) < 1e-3);
  // n=2: forced b after b_1, then the final #
  const auto two = run_sequence(g, StringSample{2}.tokens());
  CHECK(-std::log(two[3][2]) < 1e-3);
  CHECK(-std::log(two[4][0]) < 1e-3);
}

TEST_CASE("L1 and L2 match their closed forms on the golden network") {
  const GoldenConfig cfg;
  const LstmParams g = build_golden(cfg);
  const double eps = cfg.epsilon;
  const double t1 = std::tanh(1.0);

  // cell: 13 entries of 127 plus 3 of 254
  double l1_head = 0.0, l2_head = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double w = g.w_out(r, c);
      l1_head += std::fabs(w);
      l2_head += w * w;
    }
    l1_head += std::fabs(g.b_out[r]);
    l2_head += g.b_out[r] * g.b_out[r];
  }
  CHECK(l1_penalty(g) == doctest::Approx(13 * 127.0 + 3 * 254.0 + l1_head).epsilon(1e-12));
  CHECK(l2_penalty(g) == doctest::Approx(13 * 127.0 * 127.0 + 3 * 254.0 * 254.0 + l2_head).epsilon(1e-12));

  // spot values from the construction: the head L1 is ~95, totals ~2508 / ~404e3
  CHECK(l1_penalty(g) == doctest::Approx(2508.0).epsilon(0.002));
  CHECK(l2_penalty(g) == doctest::Approx(404.3e3).epsilon(0.002));
  // one closed-form head entry: (ln(0.7+eps) - ln(eps)) / tanh(1), twice in W_out
  CHECK(g.w_out(1, 0) == doctest::Approx((std::log(0.7 + eps) - std::log(eps)) / t1).epsilon(1e-14));

  CHECK(l1_penalty(LstmParams::zeros(3)) == 0.0);
  CHECK(l2_penalty(LstmParams::zeros(3)) == 0.0);
}

TEST_CASE("mdl_score of the empty h=1 network on one #ab# sample") {
  const LstmParams p = LstmParams::zeros(1);
  const LossReport r = mdl_score(p, single(1));
  CHECK(r.h_bits == 213);
  CHECK(r.data_cost_bits == doctest::Approx(3.0 * std::log2(3.0)).epsilon(1e-12));
  CHECK(r.mdl_total == doctest::Approx(213.0 + 4.754887502).epsilon(1e-9));
}

TEST_CASE("doubling the dataset doubles the data cost and keeps |H| fixed") {
  const LstmParams g = build_golden();
  Dataset once = sample_training({0.3, 5}, 60);
  Dataset twice = once;
  twice.samples.insert(twice.samples.end(), once.samples.begin(), once.samples.end());
  const LossReport a = mdl_score(g, once);
  const LossReport b = mdl_score(g, twice);
  CHECK(b.data_cost_bits == doctest::Approx(2.0 * a.data_cost_bits).epsilon(1e-9));
  CHECK(a.h_bits == b.h_bits);
}

TEST_CASE("golden MDL total lands in the reported ballpark") {
  const LstmParams g = build_golden();
  const Dataset train = sample_training({0.3, 2024}, 950);
  const LossReport r = mdl_score(g, train);
  CHECK(r.mdl_total == doctest::Approx(3.92e3).epsilon(0.10));
  CHECK(r.mdl_total >= r.h_bits);

  // data cost = (mean nats/token) * total targets / ln 2
  long long targets = 0;
  for (const auto& s : train.samples) targets += 2 * s.n + 1;
  CHECK(r.data_cost_bits == doctest::Approx(r.ce_mean_nats * targets / std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("combined_loss matches its components") {
  const LstmParams g = build_golden();
  const Dataset train = sample_training({0.3, 31}, 80);

  const double ce = ce_mean(g, train);
  CHECK(combined_loss(g, train, {ObjectiveKind::Ce, 0.0}) == ce);
  CHECK(combined_loss(g, train, {ObjectiveKind::CeL1, 0.0}) == ce);  // lambda 0 reduces to CE
  CHECK(combined_loss(g, train, {ObjectiveKind::CeL1, 0.1}) ==
        doctest::Approx(ce + 0.1 * l1_penalty(g)).epsilon(1e-12));
  CHECK(combined_loss(g, train, {ObjectiveKind::CeL2, 0.5}) ==
        doctest::Approx(ce + 0.5 * l2_penalty(g)).epsilon(1e-12));
  CHECK(combined_loss(g, train, {ObjectiveKind::Mdl, 0.0}) == mdl_score(g, train).mdl_total);

  // monotone in lambda
  CHECK(combined_loss(g, train, {ObjectiveKind::CeL1, 0.2}) > combined_loss(g, train, {ObjectiveKind::CeL1, 0.1}));
}

TEST_CASE("evaluate fills a consistent report for every kind") {
  const LstmParams g = build_golden();
  const Dataset train = sample_training({0.3, 31}, 50);
  for (ObjectiveKind kind : {ObjectiveKind::Ce, ObjectiveKind::CeL1, ObjectiveKind::CeL2, ObjectiveKind::Mdl}) {
    const LossReport r = evaluate(g, train, {kind, 0.1});
    CHECK(r.mdl_total == doctest::Approx(r.data_cost_bits + r.h_bits).epsilon(1e-12));
    CHECK(r.combined == combined_loss(g, train, {kind, 0.1}));
    if (kind == ObjectiveKind::CeL1) CHECK(r.reg_value == l1_penalty(g));
    if (kind == ObjectiveKind::CeL2) CHECK(r.reg_value == l2_penalty(g));
    if (kind == ObjectiveKind::Mdl) CHECK(r.reg_value == static_cast<double>(r.h_bits));
  }
}

TEST_CASE("deterministic accuracy of the golden network is perfect") {
  const LstmParams g = build_golden();
  const AccuracyReport r = deterministic_accuracy(g, build_test(1, 200));
  CHECK(r.per_position == 1.0);
  CHECK(r.per_string == 1.0);
  CHECK(!r.first_failure_n.has_value());
}

TEST_CASE("a constant-b predictor scores (n-1)/n per string and accepts nothing") {
  const LstmParams b = always_b();
  const Dataset t = build_test(1, 40);
  const AccuracyReport r = deterministic_accuracy(b, t);

  long long correct = 0, total = 0;
  for (int n = 1; n <= 40; ++n) {
    correct += n - 1;
    total += n;
  }
  CHECK(r.per_position == doctest::Approx(static_cast<double>(correct) / total).epsilon(1e-12));
  CHECK(r.per_string == 0.0);
  REQUIRE(r.first_failure_n.has_value());
  CHECK(*r.first_failure_n == 1);
}

TEST_CASE("a count leak fails exactly at the b_n position") {
  const LstmParams leak = leaky_golden();
  const Dataset t = build_test(1, 60);
  const AccuracyReport r = deterministic_accuracy(leak, t);

  // n = 1 has no early-# position, so it is still accepted; n >= 2 all lose
  // exactly the prediction of b_n.
  REQUIRE(r.first_failure_n.has_value());
  CHECK(*r.first_failure_n == 2);
  CHECK(r.per_string == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
  long long correct = 1, total = 1;
  for (int n = 2; n <= 60; ++n) {
    correct += n - 1;
    total += n;
  }
  CHECK(r.per_position == doctest::Approx(static_cast<double>(correct) / total).epsilon(1e-12));
}

TEST_CASE("argmax accuracy is invariant under a shared logit shift") {
  LstmParams g = build_golden();
  const AccuracyReport before = deterministic_accuracy(g, build_test(1, 30));
  for (double& b : g.b_out) b += 3.25;
  const AccuracyReport after = deterministic_accuracy(g, build_test(1, 30));
  CHECK(before.per_position == after.per_position);
  CHECK(before.per_string == after.per_string);
}

TEST_CASE("accuracy needs at least one measurable position") {
  Dataset empty_strings;
  empty_strings.samples = {{0}, {0}};
  CHECK_THROWS_AS(deterministic_accuracy(build_golden(), empty_strings), std::invalid_argument);
}

TEST_CASE("zero predicted probability yields +infinity, not an error") {
  // Finite parameters whose summed logit overflows to -inf: the # class
  // receives probability exactly 0 while the final target is #.
  LstmParams p = LstmParams::zeros(2);
  const double big = std::numeric_limits<double>::max();
  for (int k = 0; k < 2; ++k) {
    p.b_ii[k] = 127.0;
    p.b_ig[k] = -127.0;  // g = -1, so h ends up near -tanh(1)
    p.b_io[k] = 127.0;
    p.w_out(0, k) = big;
  }
  const double ce = ce_mean(p, single(1));
  CHECK(std::isinf(ce));
  CHECK(ce > 0);
}

TEST_CASE("ce is non-negative and zero only for certain predictions") {
  const LstmParams g = build_golden();
  CHECK(ce_mean(g, single(3)) > 0.0);
  CHECK(ce_mean(g, build_test(1, 10)) >= 0.0);
}
