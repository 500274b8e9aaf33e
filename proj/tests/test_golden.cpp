#include <cmath>

#include <doctest.h>

#include "clab/golden.hpp"
#include "clab/grammar.hpp"
#include "clab/lstm.hpp"
#include "clab/rng.hpp"

using namespace clab;

namespace {

std::vector<Symbol> anbn(int n) { return StringSample{n}.tokens(); }

}  // namespace

TEST_CASE("cell weights are exactly {0, +-127, +-254}") {
  const LstmParams g = build_golden();
  REQUIRE(g.hidden_size == 3);

  const double L = 127.0;
  CHECK(g.w_ig(0, 0) == L);
  CHECK(g.w_ig(1, 0) == L);
  CHECK(g.w_ig(2, 1) == L);
  CHECK(g.w_ig(2, 2) == -L);
  CHECK(g.w_ig(0, 1) == 0.0);
  CHECK(g.w_ig(0, 2) == 0.0);
  CHECK(g.w_ig(1, 1) == 0.0);
  CHECK(g.w_ig(1, 2) == 0.0);
  CHECK(g.w_ig(2, 0) == 0.0);

  for (int k = 0; k < 3; ++k) {
    CHECK(g.b_ii[k] == L);
    CHECK(g.b_if[k] == L);
    CHECK(g.b_io[k] == -L);
    for (int c = 0; c < 3; ++c) CHECK(g.w_io(k, c) == (k == c ? 2 * L : 0.0));
  }

  for (const Matrix* m : {&g.w_ii, &g.w_if, &g.w_hi, &g.w_hf, &g.w_hg, &g.w_ho})
    for (double w : m->data()) CHECK(w == 0.0);
  for (const Vector* v : {&g.b_ig, &g.b_hi, &g.b_hf, &g.b_hg, &g.b_ho})
    for (double w : *v) CHECK(w == 0.0);
}

TEST_CASE("output head matches the closed-form log construction") {
  const GoldenConfig cfg;
  const LstmParams g = build_golden(cfg);
  const double eps = cfg.epsilon;

  CHECK(g.b_out[0] == doctest::Approx(std::log(1.0 + eps)).epsilon(1e-15));
  CHECK(g.b_out[1] == doctest::Approx(std::log(eps)).epsilon(1e-15));
  CHECK(g.b_out[2] == doctest::Approx(std::log(eps)).epsilon(1e-15));
  CHECK(g.b_out[0] == doctest::Approx(6.1e-5).epsilon(1e-2));
  CHECK(g.b_out[1] == doctest::Approx(-9.704).epsilon(1e-3));

  // start-phase column: W_out[a][0] = (ln(0.7+eps) - ln(eps)) / tanh(1)
  const double expected = (std::log(0.7 + eps) - std::log(eps)) / std::tanh(1.0);
  CHECK(g.w_out(1, 0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(g.w_out(1, 0) == doctest::Approx(12.27).epsilon(1e-3));
}

TEST_CASE("memory traces count unmatched a's") {
  const LstmParams g = build_golden();

  auto last = [&](const char* s) {
    std::vector<Symbol> t;
    for (const char* c = s; *c; ++c) t.push_back(symbol_from_char(*c));
    return memory_trace(g, t).back();
  };

  const Vector aab = last("#aab");
  CHECK(aab[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(aab[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(aab[2] == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(std::fabs(last("#ab")[2]) < 1e-9);
  CHECK(last("#aaaabb")[2] == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("memory trace requires a leading boundary symbol") {
  const std::vector<Symbol> bad{Symbol::A, Symbol::B};
  CHECK_THROWS_AS(memory_trace(build_golden(), bad), std::invalid_argument);
}

TEST_CASE("counter invariant holds along random # a^n b^m prefixes up to n = 10^4") {
  const LstmParams g = build_golden();
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 10000);
    const int m = trial % 2 ? n : n / 2;  // balanced and unbalanced endings
    std::vector<Symbol> tokens{Symbol::Boundary};
    tokens.insert(tokens.end(), n, Symbol::A);
    tokens.insert(tokens.end(), m, Symbol::B);

    LstmState s = LstmState::zeros(3);
    int a_minus_b = 0;
    for (Symbol x : tokens) {
      s = step(g, s, x).state;
      if (x == Symbol::A) ++a_minus_b;
      if (x == Symbol::B) --a_minus_b;
      CHECK(std::fabs(s.c[0] - 1.0) < 1e-9);
      CHECK(std::fabs(s.c[1] - 1.0) < 1e-9);
      CHECK(std::fabs(s.c[2] - a_minus_b) < 1e-9);
    }
  }
}

TEST_CASE("the counter component survives the trailing boundary symbol") {
  const LstmParams g = build_golden();
  const auto trace = memory_trace(g, anbn(7));
  CHECK(std::fabs(trace.back()[2]) < 1e-9);  // balanced string, c2 = 0 after final #
}

TEST_CASE("hidden vector is tanh-one-hot except on balanced prefixes") {
  const LstmParams g = build_golden();
  const double t1 = std::tanh(1.0);
  LstmState s = LstmState::zeros(3);
  const int n = 4;
  auto tokens = anbn(n);
  tokens.pop_back();  // Eq-22 shape holds along # a^n b^m prefixes
  int consumed = 0, a = 0, b = 0;
  for (Symbol x : tokens) {
    s = step(g, s, x).state;
    ++consumed;
    a += x == Symbol::A;
    b += x == Symbol::B;
    if (a > b) {
      const int hot = x == Symbol::A ? 1 : 2;
      for (int k = 0; k < 3; ++k) {
        if (k == hot)
          CHECK(std::fabs(std::fabs(s.h[k]) - (k == 2 ? std::tanh(a - b) : t1)) < 1e-9);
        else
          CHECK(std::fabs(s.h[k]) < 1e-9);
      }
    } else if (a == b && a > 0) {
      for (double h : s.h) CHECK(std::fabs(h) < 1e-9);
    }
  }
}

TEST_CASE("per-phase output distributions match the targets matrix within 1e-3") {
  const GoldenConfig cfg;
  const LstmParams g = build_golden(cfg);
  const auto targets = target_distributions(cfg.p);

  const int n = 6;
  const auto dists = run_sequence(g, anbn(n));
  // phase of the prediction made after consuming token t
  for (int t = 0; t < 2 * n + 1; ++t) {
    int phase;
    if (t == 0)
      phase = 0;  // start
    else if (t <= n)
      phase = 1;  // a-phase
    else if (t < 2 * n)
      phase = 2;  // inner b
    else
      phase = 3;  // all b's consumed
    for (int r = 0; r < 3; ++r) CHECK(std::fabs(dists[t][r] - targets[phase][r]) < 1e-3);
  }
}

TEST_CASE("targets matrix rows sum to one") {
  for (const Dist& row : target_distributions(0.3)) {
    double sum = 0.0;
    for (double v : row) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("golden builder validates its configuration") {
  CHECK_THROWS_AS(build_golden({1.5, 127.0, 1e-4}), std::invalid_argument);
  CHECK_THROWS_AS(build_golden({0.3, -1.0, 1e-4}), std::invalid_argument);
  CHECK_THROWS_AS(build_golden({0.3, 127.0, 0.0}), std::invalid_argument);
}

TEST_CASE("construction is configurable away from the defaults") {
  const LstmParams g = build_golden({0.5, 50.0, 1e-3});
  CHECK(g.w_ig(0, 0) == 50.0);
  const auto dists = run_sequence(g, anbn(2));
  CHECK(std::fabs(dists[0][0] - 0.5) < 5e-3);  // p = 0.5 start phase
}
