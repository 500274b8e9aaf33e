#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "clab/grammar.hpp"
#include "clab/lstm.hpp"
#include "clab/objectives.hpp"

namespace clab {

/// A direction in parameter space, ready to be scaled by alpha/beta.
struct Direction {
  std::vector<double> delta;  // ParamVector layout
  std::uint64_t seed = 0;
  bool normalized = false;
};

/// Index sets of the per-neuron weight groups used for filter normalization.
/// With bias_in_groups (default): for every gate and hidden unit, the input
/// row, the recurrent row and both biases of that unit form one group; each
/// output unit groups its w_out row with its b_out entry. Without it, groups
/// are the matrix rows alone and bias coordinates are left out (their
/// direction components freeze to zero).
std::vector<std::vector<std::size_t>> neuron_groups(int hidden_size, bool bias_in_groups = true);

/// Rescales each group of `delta` to the norm of the matching group of
/// `center`; groups with zero center norm map to zero. Coordinates outside
/// every group are zeroed.
void filter_normalize(std::vector<double>& delta, const ParamVector& center, bool bias_in_groups = true);

/// I.i.d. standard normal entries, then filter-normalized. Deterministic per seed.
Direction sample_direction(const ParamVector& center, std::uint64_t seed, bool bias_in_groups = true);

struct SurfaceOptions {
  int grid = 51;               // odd, so the center is a grid point
  double range = 1.0;          // alpha, beta in [-range, range]
  bool bias_in_groups = true;
  int jobs = 1;
};

struct Surface {
  std::vector<double> alphas;           // grid points, ascending
  std::vector<double> betas;
  std::vector<double> values;           // row-major: values[i*grid+j] = f(alpha_i, beta_j)
  std::vector<std::int64_t> h_bits;     // per cell, MDL objective only (else empty)
  ParamVector center;
  ObjectiveConfig objective;
  std::uint64_t seed1 = 0, seed2 = 0;
  std::pair<int, int> min_cell{0, 0};
  double min_value = 0.0;
  double center_value = 0.0;
  double accuracy_at_min = 0.0;
  double accuracy_at_center = 0.0;

  int grid() const { return static_cast<int>(alphas.size()); }
  double value(int i, int j) const { return values[static_cast<std::size_t>(i) * alphas.size() + j]; }
  bool min_at_center() const;
};

/// f(alpha, beta) = combined_loss(center + alpha*delta + beta*eta) over the
/// full grid. Loss cells use `train`; the accuracy probes at the center and
/// at the grid minimum use `test`. Non-finite losses become +infinity cells.
Surface explore(const LstmParams& center, const ObjectiveConfig& objective, const Dataset& train,
                const Dataset& test, std::uint64_t seed1, std::uint64_t seed2,
                const SurfaceOptions& options = {});

/// CSV: "alpha,beta,loss[,h_bits]"; bit-exact for fixed seeds.
void save_surface_csv(const Surface& surface, const std::filesystem::path& file);
std::string surface_csv(const Surface& surface);

/// JSON summary: seeds, objective, min cell, losses, accuracies.
void save_surface_summary(const Surface& surface, const std::filesystem::path& file);
std::string surface_summary_json(const Surface& surface);

}  // namespace clab
