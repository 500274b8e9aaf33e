#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clab/grammar.hpp"
#include "clab/lstm.hpp"

namespace clab {

enum class RegKind { None, L1, L2 };
enum class InitScheme { Uniform, Normal };

std::string to_string(RegKind reg);
std::string to_string(InitScheme init);
RegKind reg_from_string(std::string_view name);
InitScheme init_from_string(std::string_view name);

struct TrainConfig {
  int train_size = 1000;  // pre-split draw count; 95%-5% train/validation
  std::uint64_t seed = 100;
  RegKind reg = RegKind::None;
  double lambda = 0.0;
  double dropout = 0.0;  // rate on h_t entering the output layer, train mode only
  std::optional<int> patience;  // epochs without validation improvement
  InitScheme init = InitScheme::Normal;
  int epochs = 20000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch = 0;  // 0 = full batch, otherwise minibatch size
  int hidden_size = 3;
  double p = 0.3;
};

struct SplitData {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Draws `cfg.train_size` strings, keeps ceil(95%) as the training set, and
/// builds the validation set as the consecutive n-range of the remaining 5%
/// count, grammar-law weighted. Test set is all n in [1, test_max_n].
SplitData make_split(const GrammarConfig& cfg, int train_size, int test_max_n = 1500);

/// Uniform: U(-k, k); Normal: N(0, k^2); k = 1/sqrt(h). Every parameter
/// (biases included) is drawn, in canonical ParamVector order.
LstmParams init_params(int hidden_size, InitScheme scheme, std::uint64_t seed);

/// Deterministic mask source for inverted dropout. Masks are drawn from a
/// fresh stream per call in fixed iteration order, so a loss and its
/// gradient see identical masks when given the same plan.
struct DropoutPlan {
  double rate = 0.0;
  std::uint64_t seed = 0;
};

/// CE averaged over all targets of the batch (weights respected) plus
/// lambda * reg.  The value gradients() differentiates.
double training_loss(const LstmParams& params, const Dataset& batch, RegKind reg, double lambda,
                     const DropoutPlan& dropout = {});

/// Exact gradient of training_loss via backpropagation through time, in
/// canonical ParamVector order. L1 subgradient at 0 is 0. Throws
/// std::runtime_error naming the parameter block if a component is
/// non-finite.
std::vector<double> gradients(const LstmParams& params, const Dataset& batch, RegKind reg, double lambda,
                              const DropoutPlan& dropout = {});

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  LstmParams params;  // best-validation snapshot
  std::vector<EpochStats> history;
  int stopped_epoch = 0;  // 1-based count of epochs actually run
  double val_loss_best = 0.0;
  int best_epoch = 0;
  double val_det_acc = 0.0;
  double test_det_acc = 0.0;
  std::optional<int> first_failure_n;  // on the test range
  bool diverged = false;
};

/// Adam + optional early stopping; returns the best-validation snapshot.
/// Divergence (non-finite loss or gradient) flags the result instead of
/// throwing.
TrainResult train(const TrainConfig& cfg, const SplitData& data);
TrainResult train(const TrainConfig& cfg);  // builds its own split

// --- hyper-parameter grid --------------------------------------------------

struct GridSpec {
  std::vector<int> train_sizes{1000};
  std::vector<std::uint64_t> seeds{100};
  std::vector<RegKind> regs{RegKind::None};
  std::vector<double> lambdas{0.1};  // applied to L1/L2 rows only
  std::vector<double> dropouts{0.0};
  std::vector<std::optional<int>> patiences{std::nullopt};
  std::vector<InitScheme> inits{InitScheme::Normal};
  int epochs = 20000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch = 0;
  int hidden_size = 3;
  double p = 0.3;
  int test_max_n = 1500;
};

GridSpec grid_spec_from_json(std::string_view text);

/// Cross product; regularized rows fan out over lambdas, reg=none rows do not.
std::vector<TrainConfig> expand_grid(const GridSpec& spec);

struct GridRow {
  TrainConfig cfg;
  TrainResult result;
  bool failed = false;
  std::string error;
};

/// Runs every configuration (optionally in parallel worker slots); rows come
/// back sorted by best validation loss, failures last. Individual failures
/// are recorded per row and do not stop the grid.
std::vector<GridRow> grid_search(const GridSpec& spec, int jobs = 1);

/// CSV report with all hyper-parameters and metrics, one row per config.
std::string grid_csv(const std::vector<GridRow>& rows);

}  // namespace clab
