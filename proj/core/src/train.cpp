#include "clab/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "clab/objectives.hpp"
#include "clab/rng.hpp"
#include "layout.hpp"

namespace clab {

namespace {

// distinct deterministic streams derived from one user-facing seed
constexpr std::uint64_t kInitStream = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kDropoutStream = 0x8BB84B93962EACC9ULL;
constexpr std::uint64_t kBatchStream = 0x2545F4914F6CDD1DULL;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

const char* kBlockNames[18] = {"W_ii", "W_if", "W_ig", "W_io", "W_hi", "W_hf", "W_hg", "W_ho", "b_ii",
                               "b_if", "b_ig", "b_io", "b_hi", "b_hf", "b_hg", "b_ho", "W_out", "b_out"};

/// Forward + reverse pass over one "# a^n b^n #" string on the flat
/// parameter vector. Gradient contributions are scaled by `u` (sample mass
/// over total target mass) so accumulation across samples is a plain sum.
class BpttWorker {
 public:
  BpttWorker(std::span<const double> params, int h) : p_(params), h_(h), l_(detail::layout(h)) {}

  void reserve(int n) {
    const std::size_t T = 2 * static_cast<std::size_t>(n) + 1;
    const std::size_t need = T * h_;
    if (i_.size() < need) {
      for (auto* v : {&i_, &f_, &g_, &o_, &c_, &tc_, &hh_, &hd_, &mask_}) v->resize(need);
      probs_.resize(T * 3);
    }
  }

  /// Returns the summed NLL of the string; masks drawn from `rng` when
  /// dropout is active (one uniform per hidden unit per step, fixed order).
  double forward(int n, double dropout_rate, Rng* rng) {
    reserve(n);
    const int T = 2 * n + 1;
    const bool drop = dropout_rate > 0.0 && rng != nullptr;
    const double keep_inv = drop ? 1.0 / (1.0 - dropout_rate) : 1.0;
    double nll = 0.0;
    for (int t = 0; t < T; ++t) {
      const int x = t == 0 ? 0 : (t <= n ? 1 : 2);
      const int tgt = t + 1 == T ? 0 : (t + 1 <= n ? 1 : 2);
      const std::size_t at = static_cast<std::size_t>(t) * h_;
      const std::size_t prev = at - h_;
      for (int k = 0; k < h_; ++k) {
        double pi = p_[l_.w_input[0] + k * kAlphabet + x] + p_[l_.b_input[0] + k] + p_[l_.b_hidden[0] + k];
        double pf = p_[l_.w_input[1] + k * kAlphabet + x] + p_[l_.b_input[1] + k] + p_[l_.b_hidden[1] + k];
        double pg = p_[l_.w_input[2] + k * kAlphabet + x] + p_[l_.b_input[2] + k] + p_[l_.b_hidden[2] + k];
        double po = p_[l_.w_input[3] + k * kAlphabet + x] + p_[l_.b_input[3] + k] + p_[l_.b_hidden[3] + k];
        if (t > 0) {
          for (int j = 0; j < h_; ++j) {
            const double hj = hh_[prev + j];
            pi += p_[l_.w_hidden[0] + k * h_ + j] * hj;
            pf += p_[l_.w_hidden[1] + k * h_ + j] * hj;
            pg += p_[l_.w_hidden[2] + k * h_ + j] * hj;
            po += p_[l_.w_hidden[3] + k * h_ + j] * hj;
          }
        }
        const double iv = sigmoid(pi), fv = sigmoid(pf), gv = std::tanh(pg), ov = sigmoid(po);
        const double cp = t > 0 ? c_[prev + k] : 0.0;
        const double cv = fv * cp + iv * gv;
        const double tcv = std::tanh(cv);
        i_[at + k] = iv;
        f_[at + k] = fv;
        g_[at + k] = gv;
        o_[at + k] = ov;
        c_[at + k] = cv;
        tc_[at + k] = tcv;
        hh_[at + k] = ov * tcv;
        double m = 1.0;
        if (drop) m = rng->uniform() < dropout_rate ? 0.0 : keep_inv;
        mask_[at + k] = m;
        hd_[at + k] = hh_[at + k] * m;
      }
      double logits[3];
      for (int r = 0; r < kAlphabet; ++r) {
        double z = p_[l_.b_out + r];
        for (int j = 0; j < h_; ++j) z += p_[l_.w_out + r * h_ + j] * hd_[at + j];
        logits[r] = z;
      }
      const double mx = std::max({logits[0], logits[1], logits[2]});
      double denom = 0.0;
      for (int r = 0; r < kAlphabet; ++r) denom += std::exp(logits[r] - mx);
      for (int r = 0; r < kAlphabet; ++r) probs_[static_cast<std::size_t>(t) * 3 + r] = std::exp(logits[r] - mx) / denom;
      nll += std::log(denom) - (logits[tgt] - mx);
    }
    return nll;
  }

  /// Reverse accumulation into `grad` (flat, same layout) with weight u.
  void backward(int n, double u, std::span<double> grad) {
    const int T = 2 * n + 1;
    std::vector<double> dh_next(h_, 0.0), dc_next(h_, 0.0), dh(h_), dp[4];
    for (auto& v : dp) v.resize(h_);
    for (int t = T - 1; t >= 0; --t) {
      const int x = t == 0 ? 0 : (t <= n ? 1 : 2);
      const int tgt = t + 1 == T ? 0 : (t + 1 <= n ? 1 : 2);
      const std::size_t at = static_cast<std::size_t>(t) * h_;
      const std::size_t prev = at - h_;

      double dlogit[3];
      for (int r = 0; r < kAlphabet; ++r)
        dlogit[r] = u * (probs_[static_cast<std::size_t>(t) * 3 + r] - (r == tgt ? 1.0 : 0.0));
      for (int r = 0; r < kAlphabet; ++r) {
        grad[l_.b_out + r] += dlogit[r];
        for (int j = 0; j < h_; ++j) grad[l_.w_out + r * h_ + j] += dlogit[r] * hd_[at + j];
      }
      for (int j = 0; j < h_; ++j) {
        double dhd = 0.0;
        for (int r = 0; r < kAlphabet; ++r) dhd += p_[l_.w_out + r * h_ + j] * dlogit[r];
        dh[j] = dhd * mask_[at + j] + dh_next[j];
      }

      for (int k = 0; k < h_; ++k) {
        const double iv = i_[at + k], fv = f_[at + k], gv = g_[at + k], ov = o_[at + k];
        const double tcv = tc_[at + k];
        const double cp = t > 0 ? c_[prev + k] : 0.0;
        const double dov = dh[k] * tcv;
        const double dcv = dh[k] * ov * (1.0 - tcv * tcv) + dc_next[k];
        const double div = dcv * gv;
        const double dgv = dcv * iv;
        const double dfv = dcv * cp;
        dc_next[k] = dcv * fv;
        dp[0][k] = div * iv * (1.0 - iv);
        dp[1][k] = dfv * fv * (1.0 - fv);
        dp[2][k] = dgv * (1.0 - gv * gv);
        dp[3][k] = dov * ov * (1.0 - ov);
      }

      for (int gate = 0; gate < 4; ++gate) {
        for (int k = 0; k < h_; ++k) {
          const double d = dp[gate][k];
          grad[l_.w_input[gate] + k * kAlphabet + x] += d;
          grad[l_.b_input[gate] + k] += d;
          grad[l_.b_hidden[gate] + k] += d;
          if (t > 0)
            for (int j = 0; j < h_; ++j) grad[l_.w_hidden[gate] + k * h_ + j] += d * hh_[prev + j];
        }
      }
      for (int j = 0; j < h_; ++j) {
        double s = 0.0;
        if (t > 0)
          for (int gate = 0; gate < 4; ++gate)
            for (int k = 0; k < h_; ++k) s += p_[l_.w_hidden[gate] + k * h_ + j] * dp[gate][k];
        dh_next[j] = s;
      }
    }
  }

 private:
  std::span<const double> p_;
  int h_;
  detail::Layout l_;
  std::vector<double> i_, f_, g_, o_, c_, tc_, hh_, hd_, mask_, probs_;
};

struct BatchItem {
  int n = 0;
  double mass = 1.0;
};

/// Expands the batch into per-walk items. Identical unweighted strings are
/// collapsed with their multiplicity unless dropout is active (each copy
/// then needs its own masks).
std::vector<BatchItem> batch_items(const Dataset& batch, bool dropout_active) {
  std::vector<BatchItem> items;
  if (!dropout_active) {
    for (const auto& [n, mass] : grouped_mass(batch)) items.push_back({n, mass});
  } else {
    items.reserve(batch.size());
    for (std::size_t s = 0; s < batch.samples.size(); ++s)
      items.push_back({batch.samples[s].n, batch.weighted() ? batch.weights[s] : 1.0});
  }
  return items;
}

double loss_and_grad(std::span<const double> params, int h, const Dataset& batch, RegKind reg, double lambda,
                     const DropoutPlan& dropout, std::vector<double>* grad) {
  if (batch.samples.empty()) throw std::invalid_argument("training loss: empty batch");
  const bool drop = dropout.rate > 0.0;
  if (dropout.rate < 0.0 || dropout.rate >= 1.0)
    throw std::invalid_argument("training loss: dropout rate must be in [0,1)");

  const auto items = batch_items(batch, drop);
  double total_mass_tokens = 0.0;
  for (const auto& it : items) total_mass_tokens += it.mass * (2.0 * it.n + 1.0);

  Rng rng(dropout.seed);
  BpttWorker worker(params, h);
  if (grad) grad->assign(params.size(), 0.0);

  double nll = 0.0;
  for (const auto& it : items) {
    const double sample_nll = worker.forward(it.n, drop ? dropout.rate : 0.0, drop ? &rng : nullptr);
    nll += it.mass * sample_nll;
    if (grad) worker.backward(it.n, it.mass / total_mass_tokens, *grad);
  }
  double loss = nll / total_mass_tokens;

  const double* flat = params.data();
  const std::size_t count = params.size();
  if (reg == RegKind::L1) {
    double s = 0.0;
    for (std::size_t w = 0; w < count; ++w) s += std::fabs(flat[w]);
    loss += lambda * s;
    if (grad)
      for (std::size_t w = 0; w < count; ++w)
        (*grad)[w] += flat[w] > 0.0 ? lambda : (flat[w] < 0.0 ? -lambda : 0.0);
  } else if (reg == RegKind::L2) {
    double s = 0.0;
    for (std::size_t w = 0; w < count; ++w) s += flat[w] * flat[w];
    loss += lambda * s;
    if (grad)
      for (std::size_t w = 0; w < count; ++w) (*grad)[w] += lambda * 2.0 * flat[w];
  }

  if (grad) {
    const detail::Layout l = detail::layout(h);
    const std::size_t starts[18] = {l.w_input[0],  l.w_input[1],  l.w_input[2],  l.w_input[3], l.w_hidden[0],
                                    l.w_hidden[1], l.w_hidden[2], l.w_hidden[3], l.b_input[0], l.b_input[1],
                                    l.b_input[2],  l.b_input[3],  l.b_hidden[0], l.b_hidden[1], l.b_hidden[2],
                                    l.b_hidden[3], l.w_out,       l.b_out};
    for (int b = 0; b < 18; ++b) {
      const std::size_t end = b + 1 < 18 ? starts[b + 1] : l.total;
      for (std::size_t w = starts[b]; w < end; ++w)
        if (!std::isfinite((*grad)[w]))
          throw std::runtime_error(std::string("non-finite gradient in block ") + kBlockNames[b]);
    }
  }
  return loss;
}

}  // namespace

std::string to_string(RegKind reg) {
  switch (reg) {
    case RegKind::None: return "none";
    case RegKind::L1: return "l1";
    case RegKind::L2: return "l2";
  }
  throw std::invalid_argument("bad reg kind");
}

std::string to_string(InitScheme init) {
  return init == InitScheme::Uniform ? "uniform" : "normal";
}

RegKind reg_from_string(std::string_view name) {
  if (name == "none") return RegKind::None;
  if (name == "l1") return RegKind::L1;
  if (name == "l2") return RegKind::L2;
  throw std::invalid_argument("unknown regularizer: " + std::string(name));
}

InitScheme init_from_string(std::string_view name) {
  if (name == "uniform") return InitScheme::Uniform;
  if (name == "normal") return InitScheme::Normal;
  throw std::invalid_argument("unknown init scheme: " + std::string(name));
}

SplitData make_split(const GrammarConfig& cfg, int train_size, int test_max_n) {
  if (train_size < 2) throw std::invalid_argument("make_split: train_size must be >= 2");
  const int kept = static_cast<int>(std::ceil(0.95 * train_size));
  const int val_count = train_size - kept;
  Dataset drawn = sample_training(cfg, train_size);
  drawn.samples.resize(kept);
  SplitData split;
  split.validation = build_validation(drawn, std::max(val_count, 1), cfg);
  split.train = std::move(drawn);
  split.test = build_test(1, test_max_n);
  return split;
}

LstmParams init_params(int hidden_size, InitScheme scheme, std::uint64_t seed) {
  if (hidden_size < 1) throw std::invalid_argument("init_params: hidden_size must be >= 1");
  Rng rng(seed);
  const double k = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  std::vector<double> values(param_count(hidden_size));
  for (double& w : values) w = scheme == InitScheme::Uniform ? rng.uniform(-k, k) : k * rng.normal();
  return unflatten(values, hidden_size);
}

double training_loss(const LstmParams& params, const Dataset& batch, RegKind reg, double lambda,
                     const DropoutPlan& dropout) {
  check_shapes(params);
  const ParamVector v = flatten(params);
  return loss_and_grad(v.values, params.hidden_size, batch, reg, lambda, dropout, nullptr);
}

std::vector<double> gradients(const LstmParams& params, const Dataset& batch, RegKind reg, double lambda,
                              const DropoutPlan& dropout) {
  check_shapes(params);
  const ParamVector v = flatten(params);
  std::vector<double> grad;
  loss_and_grad(v.values, params.hidden_size, batch, reg, lambda, dropout, &grad);
  return grad;
}

TrainResult train(const TrainConfig& cfg) {
  return train(cfg, make_split(GrammarConfig{cfg.p, cfg.seed}, cfg.train_size));
}

TrainResult train(const TrainConfig& cfg, const SplitData& data) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.patience && *cfg.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
  if (cfg.reg != RegKind::None && !(cfg.lambda > 0.0))
    throw std::invalid_argument("train: lambda must be positive with a regularizer");

  const int h = cfg.hidden_size;
  ParamVector theta = flatten(init_params(h, cfg.init, cfg.seed ^ kInitStream));
  const std::size_t P = theta.values.size();

  std::vector<double> m(P, 0.0), v(P, 0.0), grad;
  Rng batch_rng(cfg.seed ^ kBatchStream);

  TrainResult result;
  result.val_loss_best = std::numeric_limits<double>::infinity();
  result.params = unflatten(theta);
  std::vector<double> best_theta = theta.values;
  int since_best = 0;
  long long adam_t = 0;

  std::vector<std::size_t> order(data.train.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;

  const auto adam_step = [&](const std::vector<double>& g) {
    ++adam_t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t));
    for (std::size_t w = 0; w < P; ++w) {
      m[w] = cfg.beta1 * m[w] + (1.0 - cfg.beta1) * g[w];
      v[w] = cfg.beta2 * v[w] + (1.0 - cfg.beta2) * g[w] * g[w];
      theta.values[w] -= cfg.lr * (m[w] / bc1) / (std::sqrt(v[w] / bc2) + cfg.adam_eps);
    }
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double train_loss = 0.0;
    bool bad = false;
    try {
      if (cfg.batch <= 0) {
        const DropoutPlan plan{cfg.dropout, (cfg.seed ^ kDropoutStream) + static_cast<std::uint64_t>(epoch)};
        train_loss = loss_and_grad(theta.values, h, data.train, cfg.reg, cfg.lambda, plan, &grad);
        if (!std::isfinite(train_loss)) bad = true;
        if (!bad) adam_step(grad);
      } else {
        // per-epoch shuffled minibatches
        for (std::size_t s = order.size(); s > 1; --s)
          std::swap(order[s - 1], order[static_cast<std::size_t>(batch_rng.uniform() * s)]);
        double epoch_loss = 0.0;
        int chunks = 0;
        for (std::size_t begin = 0; begin < order.size() && !bad; begin += cfg.batch) {
          Dataset chunk;
          for (std::size_t s = begin; s < std::min(order.size(), begin + cfg.batch); ++s)
            chunk.samples.push_back(data.train.samples[order[s]]);
          const DropoutPlan plan{cfg.dropout, (cfg.seed ^ kDropoutStream) +
                                                  static_cast<std::uint64_t>(epoch) * 1000003ULL + begin};
          const double l = loss_and_grad(theta.values, h, chunk, cfg.reg, cfg.lambda, plan, &grad);
          if (!std::isfinite(l)) {
            bad = true;
            break;
          }
          adam_step(grad);
          epoch_loss += l;
          ++chunks;
        }
        train_loss = chunks > 0 ? epoch_loss / chunks : std::numeric_limits<double>::infinity();
      }
    } catch (const std::runtime_error&) {
      bad = true;  // non-finite gradient
    }

    if (bad) {
      result.diverged = true;
      result.stopped_epoch = epoch;
      break;
    }

    const double val_loss = ce_mean(unflatten(theta), data.validation);
    result.history.push_back({train_loss, val_loss});
    result.stopped_epoch = epoch;

    if (val_loss < result.val_loss_best) {
      result.val_loss_best = val_loss;
      result.best_epoch = epoch;
      best_theta = theta.values;
      since_best = 0;
    } else {
      ++since_best;
      if (cfg.patience && since_best >= *cfg.patience) break;
    }
  }

  result.params = unflatten(best_theta, h);
  const AccuracyReport val_acc = deterministic_accuracy(result.params, data.validation);
  const AccuracyReport test_acc = deterministic_accuracy(result.params, data.test);
  result.val_det_acc = val_acc.per_position;
  result.test_det_acc = test_acc.per_position;
  result.first_failure_n = test_acc.first_failure_n;
  return result;
}

GridSpec grid_spec_from_json(std::string_view text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GridSpec spec;
  if (j.contains("train_sizes")) spec.train_sizes = j["train_sizes"].get<std::vector<int>>();
  if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("regs")) {
    spec.regs.clear();
    for (const auto& r : j["regs"]) spec.regs.push_back(reg_from_string(r.get<std::string>()));
  }
  if (j.contains("lambdas")) spec.lambdas = j["lambdas"].get<std::vector<double>>();
  if (j.contains("dropouts")) spec.dropouts = j["dropouts"].get<std::vector<double>>();
  if (j.contains("patiences")) {
    spec.patiences.clear();
    for (const auto& p : j["patiences"])
      spec.patiences.push_back(p.is_null() ? std::optional<int>{} : std::optional<int>{p.get<int>()});
  }
  if (j.contains("inits")) {
    spec.inits.clear();
    for (const auto& i : j["inits"]) spec.inits.push_back(init_from_string(i.get<std::string>()));
  }
  if (j.contains("epochs")) spec.epochs = j["epochs"].get<int>();
  if (j.contains("lr")) spec.lr = j["lr"].get<double>();
  if (j.contains("beta1")) spec.beta1 = j["beta1"].get<double>();
  if (j.contains("beta2")) spec.beta2 = j["beta2"].get<double>();
  if (j.contains("adam_eps")) spec.adam_eps = j["adam_eps"].get<double>();
  if (j.contains("batch")) spec.batch = j["batch"].get<int>();
  if (j.contains("hidden_size")) spec.hidden_size = j["hidden_size"].get<int>();
  if (j.contains("p")) spec.p = j["p"].get<double>();
  if (j.contains("test_max_n")) spec.test_max_n = j["test_max_n"].get<int>();
  return spec;
}

std::vector<TrainConfig> expand_grid(const GridSpec& spec) {
  std::vector<TrainConfig> configs;
  for (int size : spec.train_sizes)
    for (std::uint64_t seed : spec.seeds)
      for (RegKind reg : spec.regs) {
        const std::vector<double> lambdas = reg == RegKind::None ? std::vector<double>{0.0} : spec.lambdas;
        for (double lambda : lambdas)
          for (double dropout : spec.dropouts)
            for (const auto& patience : spec.patiences)
              for (InitScheme init : spec.inits) {
                TrainConfig cfg;
                cfg.train_size = size;
                cfg.seed = seed;
                cfg.reg = reg;
                cfg.lambda = lambda;
                cfg.dropout = dropout;
                cfg.patience = patience;
                cfg.init = init;
                cfg.epochs = spec.epochs;
                cfg.lr = spec.lr;
                cfg.beta1 = spec.beta1;
                cfg.beta2 = spec.beta2;
                cfg.adam_eps = spec.adam_eps;
                cfg.batch = spec.batch;
                cfg.hidden_size = spec.hidden_size;
                cfg.p = spec.p;
                configs.push_back(cfg);
              }
      }
  return configs;
}

std::vector<GridRow> grid_search(const GridSpec& spec, int jobs) {
  const std::vector<TrainConfig> configs = expand_grid(spec);
  std::vector<GridRow> rows(configs.size());
  std::atomic<std::size_t> next{0};

  const auto run_one = [&](std::size_t idx) {
    rows[idx].cfg = configs[idx];
    try {
      const SplitData split =
          make_split(GrammarConfig{configs[idx].p, configs[idx].seed}, configs[idx].train_size, spec.test_max_n);
      rows[idx].result = train(configs[idx], split);
    } catch (const std::exception& e) {
      rows[idx].failed = true;
      rows[idx].error = e.what();
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  if (workers == 1) {
    for (std::size_t idx = 0; idx < configs.size(); ++idx) run_one(idx);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t idx = next.fetch_add(1); idx < configs.size(); idx = next.fetch_add(1)) run_one(idx);
      });
    for (auto& t : pool) t.join();
  }

  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.failed != b.failed) return !a.failed;
    return a.result.val_loss_best < b.result.val_loss_best;
  });
  return rows;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::string out =
      "train_size,seed,reg,lambda,dropout,patience,init,epochs_run,best_epoch,"
      "val_loss_best,val_det_acc,test_det_acc,first_fail_n,diverged,status\n";
  char buf[256];
  for (const GridRow& row : rows) {
    const TrainConfig& c = row.cfg;
    const TrainResult& r = row.result;
    const int len = std::snprintf(
        buf, sizeof buf, "%d,%llu,%s,%.10g,%.10g,%s,%s,%d,%d,%.10g,%.10g,%.10g,%s,%d,%s\n", c.train_size,
        static_cast<unsigned long long>(c.seed), to_string(c.reg).c_str(), c.lambda, c.dropout,
        c.patience ? std::to_string(*c.patience).c_str() : "none", to_string(c.init).c_str(), r.stopped_epoch,
        r.best_epoch, r.val_loss_best, r.val_det_acc, r.test_det_acc,
        r.first_failure_n ? std::to_string(*r.first_failure_n).c_str() : "none", r.diverged ? 1 : 0,
        row.failed ? row.error.c_str() : "ok");
    out.append(buf, len);
  }
  return out;
}

}  // namespace clab
