#pragma once

#include <cstddef>

#include "clab/lstm.hpp"

namespace clab::detail {

/// Flat offsets of every block in the canonical ParamVector order.
/// Gate index g: 0=i, 1=f, 2=g, 3=o.
struct Layout {
  std::size_t w_input[4];
  std::size_t w_hidden[4];
  std::size_t b_input[4];
  std::size_t b_hidden[4];
  std::size_t w_out;
  std::size_t b_out;
  std::size_t total;
};

inline Layout layout(int h) {
  const std::size_t hs = static_cast<std::size_t>(h);
  Layout l{};
  std::size_t pos = 0;
  for (int g = 0; g < 4; ++g) {
    l.w_input[g] = pos;
    pos += hs * kAlphabet;
  }
  for (int g = 0; g < 4; ++g) {
    l.w_hidden[g] = pos;
    pos += hs * hs;
  }
  for (int g = 0; g < 4; ++g) {
    l.b_input[g] = pos;
    pos += hs;
  }
  for (int g = 0; g < 4; ++g) {
    l.b_hidden[g] = pos;
    pos += hs;
  }
  l.w_out = pos;
  pos += kAlphabet * hs;
  l.b_out = pos;
  l.total = pos + kAlphabet;
  return l;
}

}  // namespace clab::detail
