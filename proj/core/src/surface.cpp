#include "clab/surface.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "clab/codec.hpp"
#include "clab/rng.hpp"
#include "layout.hpp"

namespace clab {

std::vector<std::vector<std::size_t>> neuron_groups(int h, bool bias_in_groups) {
  const detail::Layout l = detail::layout(h);
  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(4 * h + kAlphabet);
  for (int g = 0; g < 4; ++g) {
    for (int k = 0; k < h; ++k) {
      std::vector<std::size_t> idx;
      for (int c = 0; c < kAlphabet; ++c) idx.push_back(l.w_input[g] + static_cast<std::size_t>(k) * kAlphabet + c);
      for (int c = 0; c < h; ++c) idx.push_back(l.w_hidden[g] + static_cast<std::size_t>(k) * h + c);
      if (bias_in_groups) {
        idx.push_back(l.b_input[g] + k);
        idx.push_back(l.b_hidden[g] + k);
      }
      groups.push_back(std::move(idx));
    }
  }
  for (int r = 0; r < kAlphabet; ++r) {
    std::vector<std::size_t> idx;
    for (int c = 0; c < h; ++c) idx.push_back(l.w_out + static_cast<std::size_t>(r) * h + c);
    if (bias_in_groups) idx.push_back(l.b_out + r);
    groups.push_back(std::move(idx));
  }
  return groups;
}

void filter_normalize(std::vector<double>& delta, const ParamVector& center, bool bias_in_groups) {
  if (delta.size() != center.values.size())
    throw std::invalid_argument("filter_normalize: direction/center length mismatch");
  std::vector<bool> covered(delta.size(), false);
  for (const auto& group : neuron_groups(center.hidden_size, bias_in_groups)) {
    double cn = 0.0, dn = 0.0;
    for (std::size_t i : group) {
      cn += center.values[i] * center.values[i];
      dn += delta[i] * delta[i];
      covered[i] = true;
    }
    const double scale = (cn == 0.0 || dn == 0.0) ? 0.0 : std::sqrt(cn / dn);
    for (std::size_t i : group) delta[i] *= scale;
  }
  for (std::size_t i = 0; i < delta.size(); ++i)
    if (!covered[i]) delta[i] = 0.0;
}

Direction sample_direction(const ParamVector& center, std::uint64_t seed, bool bias_in_groups) {
  Rng rng(seed);
  Direction d;
  d.seed = seed;
  d.delta.resize(center.values.size());
  for (double& x : d.delta) x = rng.normal();
  filter_normalize(d.delta, center, bias_in_groups);
  d.normalized = true;
  return d;
}

bool Surface::min_at_center() const {
  const int c = grid() / 2;
  return min_cell.first == c && min_cell.second == c;
}

Surface explore(const LstmParams& center_params, const ObjectiveConfig& objective, const Dataset& train,
                const Dataset& test, std::uint64_t seed1, std::uint64_t seed2, const SurfaceOptions& options) {
  if (options.grid < 3 || options.grid % 2 == 0)
    throw std::invalid_argument("explore: grid must be odd and >= 3");
  if (!(options.range > 0.0)) throw std::invalid_argument("explore: range must be positive");

  Surface s;
  s.center = flatten(center_params);
  s.objective = objective;
  s.seed1 = seed1;
  s.seed2 = seed2;

  const int g = options.grid;
  const int half = g / 2;
  s.alphas.resize(g);
  s.betas.resize(g);
  for (int i = 0; i < g; ++i) {
    s.alphas[i] = options.range * static_cast<double>(i - half) / half;
    s.betas[i] = s.alphas[i];
  }

  const Direction d1 = sample_direction(s.center, seed1, options.bias_in_groups);
  const Direction d2 = sample_direction(s.center, seed2, options.bias_in_groups);

  const bool want_bits = objective.kind == ObjectiveKind::Mdl;
  const std::size_t cells = static_cast<std::size_t>(g) * g;
  s.values.assign(cells, 0.0);
  if (want_bits) s.h_bits.assign(cells, 0);

  const int h = s.center.hidden_size;
  const auto eval_cell = [&](std::size_t cell) {
    const int i = static_cast<int>(cell) / g;
    const int j = static_cast<int>(cell) % g;
    std::vector<double> point(s.center.values.size());
    for (std::size_t k = 0; k < point.size(); ++k)
      point[k] = s.center.values[k] + s.alphas[i] * d1.delta[k] + s.betas[j] * d2.delta[k];
    const LstmParams params = unflatten(point, h);
    double v;
    try {
      v = combined_loss(params, train, objective);
    } catch (const std::exception&) {
      v = std::numeric_limits<double>::infinity();
    }
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    s.values[cell] = v;
    if (want_bits) s.h_bits[cell] = description_length(point, h, objective.max_den);
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t cell = 0; cell < cells; ++cell) eval_cell(cell);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t cell = w; cell < cells; cell += jobs) eval_cell(cell);
      });
    for (auto& t : pool) t.join();
  }

  std::size_t best = 0;
  for (std::size_t cell = 1; cell < cells; ++cell)
    if (s.values[cell] < s.values[best]) best = cell;
  s.min_cell = {static_cast<int>(best) / g, static_cast<int>(best) % g};
  s.min_value = s.values[best];
  s.center_value = s.value(half, half);

  // probe accuracies: rebuild the nets at the center and at the minimum
  s.accuracy_at_center = deterministic_accuracy(center_params, test).per_position;
  std::vector<double> at_min(s.center.values.size());
  for (std::size_t k = 0; k < at_min.size(); ++k)
    at_min[k] = s.center.values[k] + s.alphas[s.min_cell.first] * d1.delta[k] + s.betas[s.min_cell.second] * d2.delta[k];
  s.accuracy_at_min = deterministic_accuracy(unflatten(at_min, h), test).per_position;
  return s;
}

std::string surface_csv(const Surface& s) {
  std::string out = s.h_bits.empty() ? "alpha,beta,loss\n" : "alpha,beta,loss,h_bits\n";
  char buf[128];
  const int g = s.grid();
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const std::size_t cell = static_cast<std::size_t>(i) * g + j;
      int len = std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g", s.alphas[i], s.betas[j], s.values[cell]);
      out.append(buf, len);
      if (!s.h_bits.empty()) {
        len = std::snprintf(buf, sizeof buf, ",%lld", static_cast<long long>(s.h_bits[cell]));
        out.append(buf, len);
      }
      out.push_back('\n');
    }
  }
  return out;
}

void save_surface_csv(const Surface& s, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << surface_csv(s);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string surface_summary_json(const Surface& s) {
  nlohmann::json j;
  j["objective"] = to_string(s.objective.kind);
  j["lambda"] = s.objective.lambda;
  j["max_den"] = s.objective.max_den;
  j["seeds"] = {s.seed1, s.seed2};
  j["grid"] = s.grid();
  j["range"] = s.alphas.empty() ? 0.0 : s.alphas.back();
  j["min_cell"] = {s.min_cell.first, s.min_cell.second};
  j["min_alpha"] = s.alphas[s.min_cell.first];
  j["min_beta"] = s.betas[s.min_cell.second];
  j["min_loss"] = s.min_value;
  j["center_loss"] = s.center_value;
  j["min_at_center"] = s.min_at_center();
  j["accuracy_at_min"] = s.accuracy_at_min;
  j["accuracy_at_center"] = s.accuracy_at_center;
  return j.dump(2) + "\n";
}

void save_surface_summary(const Surface& s, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << surface_summary_json(s);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace clab
