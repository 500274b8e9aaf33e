#include "clab/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "clab/rng.hpp"

namespace clab {

std::vector<Symbol> StringSample::tokens() const {
  std::vector<Symbol> toks;
  toks.reserve(token_count());
  toks.push_back(Symbol::Boundary);
  toks.insert(toks.end(), n, Symbol::A);
  toks.insert(toks.end(), n, Symbol::B);
  toks.push_back(Symbol::Boundary);
  return toks;
}

int max_n(const Dataset& data) {
  int m = -1;
  for (const StringSample& s : data.samples) m = std::max(m, s.n);
  return m;
}

std::vector<std::pair<int, double>> grouped_mass(const Dataset& data) {
  std::map<int, double> mass;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    mass[data.samples[i].n] += data.weighted() ? data.weights[i] : 1.0;
  return {mass.begin(), mass.end()};
}

Dataset sample_training(const GrammarConfig& cfg, int size) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw std::invalid_argument("sample_training: p must be in (0,1)");
  if (size < 1) throw std::invalid_argument("sample_training: size must be >= 1");
  Rng rng(cfg.seed);
  Dataset data;
  data.samples.reserve(size);
  for (int i = 0; i < size; ++i) data.samples.push_back({rng.geometric(cfg.p)});
  return data;
}

Dataset build_validation(const Dataset& train, int count, const GrammarConfig& cfg) {
  if (count < 1) throw std::invalid_argument("build_validation: count must be >= 1");
  const int start = max_n(train) + 1;
  Dataset data;
  data.samples.reserve(count);
  data.weights.reserve(count);
  double total = 0.0;
  for (int n = start; n < start + count; ++n) {
    data.samples.push_back({n});
    const double w = cfg.p * std::pow(1.0 - cfg.p, n);
    data.weights.push_back(w);
    total += w;
  }
  for (double& w : data.weights) w /= total;
  return data;
}

Dataset build_test(int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("build_test: need 1 <= n_min <= n_max");
  Dataset data;
  data.samples.reserve(n_max - n_min + 1);
  for (int n = n_min; n <= n_max; ++n) data.samples.push_back({n});
  return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& file) {
  if (data.weighted() && data.weights.size() != data.samples.size())
    throw std::invalid_argument("save_dataset: weight count mismatch");
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    std::string line;
    for (Symbol s : data.samples[i].tokens()) line.push_back(symbol_char(s));
    out << line;
    if (data.weighted()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", data.weights[i]);
      out << '\t' << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

namespace {

StringSample parse_sample(const std::string& text, const std::filesystem::path& file, int lineno) {
  const auto fail = [&](const char* why) {
    throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": " + why);
  };
  if (text.size() < 2 || text.front() != '#' || text.back() != '#') fail("line must start and end with #");
  std::size_t i = 1;
  while (i < text.size() - 1 && text[i] == 'a') ++i;
  const int n = static_cast<int>(i - 1);
  for (int k = 0; k < n; ++k, ++i)
    if (i >= text.size() - 1 || text[i] != 'b') fail("malformed a^n b^n string");
  if (i != text.size() - 1) fail("malformed a^n b^n string");
  return {n};
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  Dataset data;
  std::string line;
  int lineno = 0;
  bool any_weight = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    const std::string toks = tab == std::string::npos ? line : line.substr(0, tab);
    data.samples.push_back(parse_sample(toks, file, lineno));
    if (tab != std::string::npos) {
      any_weight = true;
      data.weights.push_back(std::stod(line.substr(tab + 1)));
    } else if (any_weight) {
      throw std::runtime_error(file.string() + ": mixed weighted and unweighted lines");
    }
  }
  if (any_weight && data.weights.size() != data.samples.size())
    throw std::runtime_error(file.string() + ": mixed weighted and unweighted lines");
  return data;
}

}  // namespace clab
