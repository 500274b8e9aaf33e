#pragma once

#include <array>
#include <span>
#include <vector>

#include "clab/lstm.hpp"

namespace clab {

/// Constants of the hand-built a^n b^n network.
///   p       — stop probability of the generating grammar
///   large   — gate saturation constant (2^7 - 1)
///   epsilon — log-of-zero guard in the output head ((2^14 - 1)^-1)
struct GoldenConfig {
  double p = 0.3;
  double large = 127.0;
  double epsilon = 1.0 / 16383.0;
};

/// Optimal next-symbol distributions per string phase, rows:
/// start, a-phase, inner-b-phase, final-b. Columns follow [#, a, b].
std::array<Dist, 4> target_distributions(double p);

/// Builds the 3-unit LSTM whose memory cell counts unmatched a's and whose
/// head emits the exact grammar probabilities for every phase.
LstmParams build_golden(const GoldenConfig& cfg = {});

/// Memory-cell vector c_t recorded after each input token.
std::vector<Vector> memory_trace(const LstmParams& params, std::span<const Symbol> tokens);

}  // namespace clab
