#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clab {

// Alphabet of the a^n b^n task. One-hot input order is [#, a, b].
enum class Symbol : int {
  Boundary = 0,  // '#', start/end-of-sequence marker
  A = 1,
  B = 2,
};

inline constexpr int kAlphabet = 3;

char symbol_char(Symbol s);
Symbol symbol_from_char(char c);

/// Dense row-major matrix, sized for tiny recurrent cells.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

using Vector = std::vector<double>;

/// All weights of a single-layer LSTM cell plus the linear output head.
/// Naming follows the usual cell equations: i/f/g/o gates, `i`-prefixed
/// matrices act on the input, `h`-prefixed on the previous hidden state.
struct LstmParams {
  int hidden_size = 0;

  Matrix w_ii, w_if, w_ig, w_io;  // h x 3
  Matrix w_hi, w_hf, w_hg, w_ho;  // h x h
  Vector b_ii, b_if, b_ig, b_io;  // h
  Vector b_hi, b_hf, b_hg, b_ho;  // h
  Matrix w_out;                   // 3 x h
  Vector b_out;                   // 3

  static LstmParams zeros(int hidden_size);

  bool operator==(const LstmParams&) const = default;
};

/// Validates shape consistency; throws std::invalid_argument on mismatch.
void check_shapes(const LstmParams& params);

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(int hidden_size) { return {Vector(hidden_size, 0.0), Vector(hidden_size, 0.0)}; }
};

using Dist = std::array<double, 3>;  // probability distribution over [#, a, b]

struct StepResult {
  LstmState state;
  Dist dist;
};

/// One LSTM step followed by the softmax output head.
/// The one-hot input is applied by selecting column `x` of the input matrices.
StepResult step(const LstmParams& params, const LstmState& state, Symbol x);

/// Feeds the whole token sequence from a zero state; returns the next-symbol
/// distribution emitted at every position. Throws on empty input.
std::vector<Dist> run_sequence(const LstmParams& params, std::span<const Symbol> tokens);

// --- canonical flattening ------------------------------------------------
//
// Fixed layout: W_ii,W_if,W_ig,W_io,W_hi,W_hf,W_hg,W_ho,
//               b_ii,b_if,b_ig,b_io,b_hi,b_hf,b_hg,b_ho,W_out,b_out,
// each matrix row-major. Every module that treats the network as a flat
// coordinate vector (encoding, surfaces, gradients) uses this order.

struct ParamVector {
  int hidden_size = 0;
  std::vector<double> values;
};

/// Number of parameters: 12h + 4h^2 + 8h + 3h + 3.
std::size_t param_count(int hidden_size);

ParamVector flatten(const LstmParams& params);
LstmParams unflatten(std::span<const double> values, int hidden_size);
inline LstmParams unflatten(const ParamVector& v) { return unflatten(v.values, v.hidden_size); }

// --- JSON serialization ---------------------------------------------------
// Schema: {"hidden_size": h, "weights": {"W_ii": [[...]], ..., "b_out": [...]}}

std::string network_to_json(const LstmParams& params);
LstmParams network_from_json(std::string_view text);
void save_network(const LstmParams& params, const std::filesystem::path& file);
LstmParams load_network(const std::filesystem::path& file);

}  // namespace clab
