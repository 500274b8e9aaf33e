#include "clab/golden.hpp"

#include <cmath>
#include <stdexcept>

namespace clab {

std::array<Dist, 4> target_distributions(double p) {
  return {{
      {p, 1.0 - p, 0.0},  // start: stop now or open an a
      {0.0, 1.0 - p, p},  // a-phase: another a or the first b
      {0.0, 0.0, 1.0},    // inner b-phase: forced b
      {1.0, 0.0, 0.0},    // final b consumed: forced #
  }};
}

LstmParams build_golden(const GoldenConfig& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw std::invalid_argument("build_golden: p must be in (0,1)");
  if (!(cfg.large > 0.0)) throw std::invalid_argument("build_golden: large must be positive");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("build_golden: epsilon must be positive");

  LstmParams p = LstmParams::zeros(3);

  // Cell: c holds [1, 1, #a - #b]. The candidate gate writes the counter
  // updates, input/forget gates are saturated open through their biases, and
  // the output gate one-hot masks on the current symbol.
  const double L = cfg.large;
  p.w_ig(0, 0) = L;
  p.w_ig(1, 0) = L;
  p.w_ig(2, 1) = L;
  p.w_ig(2, 2) = -L;
  for (int k = 0; k < 3; ++k) {
    p.b_ii[k] = L;
    p.b_if[k] = L;
    p.w_io(k, k) = 2.0 * L;
    p.b_io[k] = -L;
  }

  // Head: logits built backwards from the four phase targets. The fourth
  // phase lives in the bias; the first three are superimposed onto the
  // tanh-one-hot hidden vector.
  const auto targets = target_distributions(cfg.p);
  double w_log[4][3];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) w_log[r][c] = std::log(targets[r][c] + cfg.epsilon);

  const double t1 = std::tanh(1.0);
  for (int c = 0; c < 3; ++c) p.b_out[c] = w_log[3][c];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.w_out(c, r) = (w_log[r][c] - p.b_out[c]) / t1;

  return p;
}

std::vector<Vector> memory_trace(const LstmParams& params, std::span<const Symbol> tokens) {
  if (tokens.empty() || tokens.front() != Symbol::Boundary)
    throw std::invalid_argument("memory_trace: tokens must start with #");
  std::vector<Vector> trace;
  trace.reserve(tokens.size());
  LstmState state = LstmState::zeros(params.hidden_size);
  for (Symbol x : tokens) {
    StepResult r = step(params, state, x);
    state = std::move(r.state);
    trace.push_back(state.c);
  }
  return trace;
}

}  // namespace clab
