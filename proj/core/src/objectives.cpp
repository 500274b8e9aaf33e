#include "clab/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "clab/codec.hpp"

namespace clab {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Per-string statistics for "# a^n b^n #", computed in one forward pass
/// without intermediate allocation. Measured positions are the n
/// predictions emitted while consuming b_1..b_n.
struct StringStats {
  double nll = 0.0;  // summed over all 2n+1 targets
  int measured = 0;
  int correct = 0;
};

class SeqEvaluator {
 public:
  explicit SeqEvaluator(const LstmParams& p) : p_(p), h_(p.hidden_size, 0.0), c_(p.hidden_size, 0.0) {
    check_shapes(p);
  }

  StringStats run(int n) {
    const int hs = p_.hidden_size;
    std::fill(h_.begin(), h_.end(), 0.0);
    std::fill(c_.begin(), c_.end(), 0.0);
    StringStats stats;
    const int total = 2 * n + 2;
    for (int t = 0; t + 1 < total; ++t) {
      const int x = t == 0 ? 0 : (t <= n ? 1 : 2);
      const int target = t + 1 == total - 1 ? 0 : (t + 1 <= n ? 1 : 2);

      for (int k = 0; k < hs; ++k) {
        double pi = p_.w_ii(k, x) + p_.b_ii[k] + p_.b_hi[k];
        double pf = p_.w_if(k, x) + p_.b_if[k] + p_.b_hf[k];
        double pg = p_.w_ig(k, x) + p_.b_ig[k] + p_.b_hg[k];
        double po = p_.w_io(k, x) + p_.b_io[k] + p_.b_ho[k];
        for (int j = 0; j < hs; ++j) {
          const double hj = h_[j];
          pi += p_.w_hi(k, j) * hj;
          pf += p_.w_hf(k, j) * hj;
          pg += p_.w_hg(k, j) * hj;
          po += p_.w_ho(k, j) * hj;
        }
        cn_[k] = sigmoid(pf) * c_[k] + sigmoid(pi) * std::tanh(pg);
        hn_[k] = sigmoid(po) * std::tanh(cn_[k]);
      }
      for (int k = 0; k < hs; ++k) {
        c_[k] = cn_[k];
        h_[k] = hn_[k];
      }

      double logits[3];
      for (int r = 0; r < kAlphabet; ++r) {
        double z = p_.b_out[r];
        for (int j = 0; j < hs; ++j) z += p_.w_out(r, j) * h_[j];
        logits[r] = z;
      }
      const double m = std::max({logits[0], logits[1], logits[2]});
      double denom = 0.0;
      for (double z : logits) denom += std::exp(z - m);
      // -log p(target) = log(sum exp(z - m)) - (z_target - m)
      stats.nll += std::log(denom) - (logits[target] - m);

      if (t >= n + 1) {  // just consumed some b_k
        ++stats.measured;
        int arg = 0;
        bool tie = false;
        for (int r = 1; r < kAlphabet; ++r) {
          if (logits[r] > logits[arg]) {
            arg = r;
            tie = false;
          } else if (logits[r] == logits[arg]) {
            tie = true;
          }
        }
        if (!tie && arg == target) ++stats.correct;
      }
    }
    return stats;
  }

 private:
  const LstmParams& p_;
  Vector h_, c_;
  double cn_[64] = {};  // hidden sizes here are tiny; fixed scratch is fine
  double hn_[64] = {};
};

struct DataCost {
  double mass_nll = 0.0;     // sum of mass * per-sample NLL
  double mass_tokens = 0.0;  // sum of mass * target count
  bool infinite = false;
};

DataCost data_cost(const LstmParams& params, const Dataset& data) {
  if (data.samples.empty()) throw std::invalid_argument("loss evaluation: empty dataset");
  if (params.hidden_size > 64) throw std::invalid_argument("loss evaluation: hidden size too large");
  SeqEvaluator eval(params);
  KahanSum nll, tokens;
  bool infinite = false;
  for (const auto& [n, mass] : grouped_mass(data)) {
    const StringStats s = eval.run(n);
    if (!std::isfinite(s.nll)) infinite = true;
    if (!infinite) nll.add(mass * s.nll);
    tokens.add(mass * (2.0 * n + 1.0));
  }
  return {infinite ? std::numeric_limits<double>::infinity() : nll.sum, tokens.sum, infinite};
}

}  // namespace

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Ce: return "ce";
    case ObjectiveKind::CeL1: return "l1";
    case ObjectiveKind::CeL2: return "l2";
    case ObjectiveKind::Mdl: return "mdl";
  }
  throw std::invalid_argument("bad objective kind");
}

ObjectiveKind objective_from_string(std::string_view name) {
  if (name == "ce") return ObjectiveKind::Ce;
  if (name == "l1" || name == "ce+l1") return ObjectiveKind::CeL1;
  if (name == "l2" || name == "ce+l2") return ObjectiveKind::CeL2;
  if (name == "mdl") return ObjectiveKind::Mdl;
  throw std::invalid_argument("unknown objective: " + std::string(name));
}

double ce_mean(const LstmParams& params, const Dataset& data) {
  const DataCost c = data_cost(params, data);
  return c.mass_nll / c.mass_tokens;
}

double l1_penalty(const LstmParams& params) {
  KahanSum s;
  for (double w : flatten(params).values) s.add(std::fabs(w));
  return s.sum;
}

double l2_penalty(const LstmParams& params) {
  KahanSum s;
  for (double w : flatten(params).values) s.add(w * w);
  return s.sum;
}

LossReport mdl_score(const LstmParams& params, const Dataset& data, std::int64_t max_den) {
  const DataCost c = data_cost(params, data);
  LossReport r;
  r.ce_mean_nats = c.mass_nll / c.mass_tokens;
  r.data_cost_bits = c.mass_nll / kLn2;
  r.h_bits = description_length(params, max_den);
  r.mdl_total = r.data_cost_bits + static_cast<double>(r.h_bits);
  r.reg_value = static_cast<double>(r.h_bits);
  r.combined = r.mdl_total;
  return r;
}

double combined_loss(const LstmParams& params, const Dataset& data, const ObjectiveConfig& cfg) {
  switch (cfg.kind) {
    case ObjectiveKind::Ce: return ce_mean(params, data);
    case ObjectiveKind::CeL1: return ce_mean(params, data) + cfg.lambda * l1_penalty(params);
    case ObjectiveKind::CeL2: return ce_mean(params, data) + cfg.lambda * l2_penalty(params);
    case ObjectiveKind::Mdl: return mdl_score(params, data, cfg.max_den).mdl_total;
  }
  throw std::invalid_argument("bad objective kind");
}

LossReport evaluate(const LstmParams& params, const Dataset& data, const ObjectiveConfig& cfg) {
  LossReport r = mdl_score(params, data, cfg.max_den);
  switch (cfg.kind) {
    case ObjectiveKind::Ce:
      r.reg_value = 0.0;
      r.combined = r.ce_mean_nats;
      break;
    case ObjectiveKind::CeL1:
      r.reg_value = l1_penalty(params);
      r.combined = r.ce_mean_nats + cfg.lambda * r.reg_value;
      break;
    case ObjectiveKind::CeL2:
      r.reg_value = l2_penalty(params);
      r.combined = r.ce_mean_nats + cfg.lambda * r.reg_value;
      break;
    case ObjectiveKind::Mdl:
      break;
  }
  return r;
}

std::string loss_report_to_json(const LossReport& r) {
  nlohmann::json j;
  j["ce_mean_nats"] = r.ce_mean_nats;
  j["reg_value"] = r.reg_value;
  j["combined"] = r.combined;
  j["data_cost_bits"] = r.data_cost_bits;
  j["h_bits"] = r.h_bits;
  j["mdl_total"] = r.mdl_total;
  return j.dump(2) + "\n";
}

AccuracyReport deterministic_accuracy(const LstmParams& params, const Dataset& data) {
  if (data.samples.empty()) throw std::invalid_argument("deterministic_accuracy: empty dataset");
  if (params.hidden_size > 64) throw std::invalid_argument("deterministic_accuracy: hidden size too large");
  SeqEvaluator eval(params);

  long long measured = 0, correct = 0;
  long long strings = 0, accepted = 0;
  std::optional<int> first_fail;
  for (const auto& [n, mass] : grouped_mass(data)) {
    if (n < 1) continue;
    long long count = data.weighted() ? 0 : std::llround(mass);
    if (data.weighted()) {
      for (const StringSample& s : data.samples) count += s.n == n ? 1 : 0;
    }
    const StringStats s = eval.run(n);
    measured += count * s.measured;
    correct += count * s.correct;
    strings += count;
    if (s.correct == s.measured) {
      accepted += count;
    } else if (!first_fail || n < *first_fail) {
      first_fail = n;
    }
  }
  if (measured == 0) throw std::invalid_argument("deterministic_accuracy: no measurable positions");
  AccuracyReport r;
  r.per_position = static_cast<double>(correct) / static_cast<double>(measured);
  r.per_string = static_cast<double>(accepted) / static_cast<double>(strings);
  r.first_failure_n = first_fail;
  return r;
}

}  // namespace clab
