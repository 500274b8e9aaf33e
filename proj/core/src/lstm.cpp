#include "clab/lstm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace clab {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

char symbol_char(Symbol s) {
  switch (s) {
    case Symbol::Boundary: return '#';
    case Symbol::A: return 'a';
    case Symbol::B: return 'b';
  }
  throw std::invalid_argument("symbol_char: bad symbol");
}

Symbol symbol_from_char(char c) {
  switch (c) {
    case '#': return Symbol::Boundary;
    case 'a': return Symbol::A;
    case 'b': return Symbol::B;
  }
  throw std::invalid_argument(std::string("symbol_from_char: bad character '") + c + "'");
}

LstmParams LstmParams::zeros(int hidden_size) {
  LstmParams p;
  p.hidden_size = hidden_size;
  for (Matrix* m : {&p.w_ii, &p.w_if, &p.w_ig, &p.w_io}) *m = Matrix(hidden_size, kAlphabet);
  for (Matrix* m : {&p.w_hi, &p.w_hf, &p.w_hg, &p.w_ho}) *m = Matrix(hidden_size, hidden_size);
  for (Vector* v : {&p.b_ii, &p.b_if, &p.b_ig, &p.b_io, &p.b_hi, &p.b_hf, &p.b_hg, &p.b_ho})
    *v = Vector(hidden_size, 0.0);
  p.w_out = Matrix(kAlphabet, hidden_size);
  p.b_out = Vector(kAlphabet, 0.0);
  return p;
}

void check_shapes(const LstmParams& p) {
  const int h = p.hidden_size;
  require(h >= 1, "hidden_size must be >= 1");
  for (const Matrix* m : {&p.w_ii, &p.w_if, &p.w_ig, &p.w_io})
    require(m->rows() == h && m->cols() == kAlphabet, "input weight matrix shape mismatch");
  for (const Matrix* m : {&p.w_hi, &p.w_hf, &p.w_hg, &p.w_ho})
    require(m->rows() == h && m->cols() == h, "hidden weight matrix shape mismatch");
  for (const Vector* v : {&p.b_ii, &p.b_if, &p.b_ig, &p.b_io, &p.b_hi, &p.b_hf, &p.b_hg, &p.b_ho})
    require(static_cast<int>(v->size()) == h, "bias shape mismatch");
  require(p.w_out.rows() == kAlphabet && p.w_out.cols() == h, "output matrix shape mismatch");
  require(static_cast<int>(p.b_out.size()) == kAlphabet, "output bias shape mismatch");
}

StepResult step(const LstmParams& p, const LstmState& state, Symbol x) {
  const int h = p.hidden_size;
  require(static_cast<int>(state.h.size()) == h && static_cast<int>(state.c.size()) == h,
          "state shape does not match hidden_size");

  const int xi = static_cast<int>(x);
  StepResult out;
  out.state.h.resize(h);
  out.state.c.resize(h);

  for (int k = 0; k < h; ++k) {
    double pi = p.w_ii(k, xi) + p.b_ii[k] + p.b_hi[k];
    double pf = p.w_if(k, xi) + p.b_if[k] + p.b_hf[k];
    double pg = p.w_ig(k, xi) + p.b_ig[k] + p.b_hg[k];
    double po = p.w_io(k, xi) + p.b_io[k] + p.b_ho[k];
    for (int j = 0; j < h; ++j) {
      const double hj = state.h[j];
      pi += p.w_hi(k, j) * hj;
      pf += p.w_hf(k, j) * hj;
      pg += p.w_hg(k, j) * hj;
      po += p.w_ho(k, j) * hj;
    }
    const double i = sigmoid(pi);
    const double f = sigmoid(pf);
    const double g = std::tanh(pg);
    const double o = sigmoid(po);
    const double c = f * state.c[k] + i * g;
    out.state.c[k] = c;
    out.state.h[k] = o * std::tanh(c);
  }

  std::array<double, 3> logits{};
  for (int r = 0; r < kAlphabet; ++r) {
    double z = p.b_out[r];
    for (int j = 0; j < h; ++j) z += p.w_out(r, j) * out.state.h[j];
    logits[r] = z;
  }
  const double m = std::max({logits[0], logits[1], logits[2]});
  double sum = 0.0;
  for (int r = 0; r < kAlphabet; ++r) {
    out.dist[r] = std::exp(logits[r] - m);
    sum += out.dist[r];
  }
  for (int r = 0; r < kAlphabet; ++r) out.dist[r] /= sum;
  return out;
}

std::vector<Dist> run_sequence(const LstmParams& p, std::span<const Symbol> tokens) {
  if (tokens.empty()) throw std::invalid_argument("run_sequence: empty token sequence");
  std::vector<Dist> dists;
  dists.reserve(tokens.size());
  LstmState state = LstmState::zeros(p.hidden_size);
  for (Symbol x : tokens) {
    StepResult r = step(p, state, x);
    state = std::move(r.state);
    dists.push_back(r.dist);
  }
  return dists;
}

std::size_t param_count(int h) {
  const std::size_t hs = static_cast<std::size_t>(h);
  return 4 * hs * kAlphabet + 4 * hs * hs + 8 * hs + kAlphabet * hs + kAlphabet;
}

namespace {

// Canonical member order shared by flatten/unflatten/serialization.
template <typename P, typename FnM, typename FnV>
void for_each_block(P& p, FnM&& mat, FnV&& vec) {
  mat("W_ii", p.w_ii);
  mat("W_if", p.w_if);
  mat("W_ig", p.w_ig);
  mat("W_io", p.w_io);
  mat("W_hi", p.w_hi);
  mat("W_hf", p.w_hf);
  mat("W_hg", p.w_hg);
  mat("W_ho", p.w_ho);
  vec("b_ii", p.b_ii);
  vec("b_if", p.b_if);
  vec("b_ig", p.b_ig);
  vec("b_io", p.b_io);
  vec("b_hi", p.b_hi);
  vec("b_hf", p.b_hf);
  vec("b_hg", p.b_hg);
  vec("b_ho", p.b_ho);
  mat("W_out", p.w_out);
  vec("b_out", p.b_out);
}

}  // namespace

ParamVector flatten(const LstmParams& p) {
  check_shapes(p);
  ParamVector v;
  v.hidden_size = p.hidden_size;
  v.values.reserve(param_count(p.hidden_size));
  for_each_block(
      p, [&](const char*, const Matrix& m) { v.values.insert(v.values.end(), m.data().begin(), m.data().end()); },
      [&](const char*, const Vector& b) { v.values.insert(v.values.end(), b.begin(), b.end()); });
  return v;
}

LstmParams unflatten(std::span<const double> values, int hidden_size) {
  if (hidden_size < 1) throw std::invalid_argument("unflatten: hidden_size must be >= 1");
  if (values.size() != param_count(hidden_size))
    throw std::invalid_argument("unflatten: vector length inconsistent with hidden_size");
  LstmParams p = LstmParams::zeros(hidden_size);
  std::size_t pos = 0;
  for_each_block(
      p,
      [&](const char*, Matrix& m) {
        std::copy(values.begin() + pos, values.begin() + pos + m.data().size(), m.data().begin());
        pos += m.data().size();
      },
      [&](const char*, Vector& b) {
        std::copy(values.begin() + pos, values.begin() + pos + b.size(), b.begin());
        pos += b.size();
      });
  return p;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, int rows, int cols, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::invalid_argument("network json: bad row count for " + name);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("network json: bad column count for " + name);
    for (int c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& j, int n, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument("network json: bad length for " + name);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

std::string network_to_json(const LstmParams& p) {
  check_shapes(p);
  nlohmann::json j;
  j["hidden_size"] = p.hidden_size;
  nlohmann::json& w = j["weights"];
  for_each_block(
      p, [&](const char* name, const Matrix& m) { w[name] = matrix_to_json(m); },
      [&](const char* name, const Vector& b) { w[name] = b; });
  return j.dump(2) + "\n";
}

LstmParams network_from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int h = j.at("hidden_size").get<int>();
  if (h < 1) throw std::invalid_argument("network json: hidden_size must be >= 1");
  LstmParams p = LstmParams::zeros(h);
  const nlohmann::json& w = j.at("weights");
  for_each_block(
      p,
      [&](const char* name, Matrix& m) { m = matrix_from_json(w.at(name), m.rows(), m.cols(), name); },
      [&](const char* name, Vector& b) { b = vector_from_json(w.at(name), static_cast<int>(b.size()), name); });
  check_shapes(p);
  return p;
}

void save_network(const LstmParams& p, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << network_to_json(p);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

LstmParams load_network(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return network_from_json(buf.str());
}

}  // namespace clab
