#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "clab/grammar.hpp"
#include "clab/lstm.hpp"

namespace clab {

enum class ObjectiveKind { Ce, CeL1, CeL2, Mdl };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(std::string_view name);  // ce | l1 | l2 | mdl

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::Ce;
  double lambda = 0.0;          // ignored for Ce and Mdl
  std::int64_t max_den = 1000;  // float -> rational bound for |H|
};

struct LossReport {
  double ce_mean_nats = 0.0;   // per-token mean negative log-likelihood
  double reg_value = 0.0;      // L1 or L2 sum (|H| in bits for MDL)
  double combined = 0.0;       // ce + lambda*reg, or mdl_total for MDL
  double data_cost_bits = 0.0; // |D:H|: summed CE in log base 2
  std::int64_t h_bits = 0;     // |H|
  double mdl_total = 0.0;      // data_cost_bits + h_bits
};

std::string loss_report_to_json(const LossReport& report);

/// Mean CE in nats per token: sum over samples of mass * per-sample NLL
/// divided by sum of mass * token count (mass = weight, or 1 when uniform).
/// Targets with zero predicted probability yield +infinity, not an error.
double ce_mean(const LstmParams& params, const Dataset& data);

/// Sum of |w| / w^2 over every parameter, biases included.
double l1_penalty(const LstmParams& params);
double l2_penalty(const LstmParams& params);

/// Eq-1 style score: data cost (summed CE in bits; weight-scaled when the
/// dataset is weighted) plus the network description length.
LossReport mdl_score(const LstmParams& params, const Dataset& data, std::int64_t max_den = 1000);

double combined_loss(const LstmParams& params, const Dataset& data, const ObjectiveConfig& cfg);

/// Full report for any objective kind (all fields populated).
LossReport evaluate(const LstmParams& params, const Dataset& data, const ObjectiveConfig& cfg);

struct AccuracyReport {
  double per_position = 0.0;  // correct argmax / measured positions
  double per_string = 0.0;    // strings with every measured position correct
  std::optional<int> first_failure_n;  // smallest rejected n, if any
};

/// Deterministic accuracy: predictions made after consuming b_1..b_n
/// (targets b_2..b_n then #). Samples with n = 0 carry no measured
/// positions; a dataset with none at all is an error. Argmax ties count
/// as incorrect.
AccuracyReport deterministic_accuracy(const LstmParams& params, const Dataset& data);

}  // namespace clab
