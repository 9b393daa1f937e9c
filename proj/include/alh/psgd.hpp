#pragma once
// Projected SGD on the unit sphere. Each step takes one gradient sample from
// the active oracle, moves against it, and projects back to the sphere;
// because every sample is tangent to the current iterate the pre-projection
// norm satisfies ||v_i||^2 = 1 + beta^2 ||g_i||^2 >= 1. The returned iterate
// is w_R for an index R drawn uniformly from {0, ..., N-1} before the loop.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alh/active_fo.hpp"
#include "alh/vec.hpp"

namespace alh {

enum class PsgdInit { random, e1 };

struct PsgdConfig {
  std::uint64_t steps = 0;   // N
  double beta = 0.0;         // step size
  double sigma = 0.0;
  PsgdInit init = PsgdInit::random;
  bool record_trajectory = false;
  int trajectory_stride = 1;
  // Telemetry only: when set, trajectory rows include the angle to this
  // direction. The optimizer itself never reads it.
  const UnitVector* target = nullptr;
};

struct TrajectoryPoint {
  std::uint64_t step;
  double angle_to_target;  // NaN when no target was provided
  double grad_norm;        // norm of the gradient sample at this step
  std::uint64_t labels_cumulative;
};

struct PsgdResult {
  UnitVector iterate;
  std::uint64_t chosen_index = 0;  // R
  std::uint64_t labels_spent = 0;
  std::vector<TrajectoryPoint> trajectory;
};

// Thrown when the oracle budget runs out mid-run; carries the partial state.
struct PsgdBudgetExhausted : std::runtime_error {
  std::uint64_t steps_completed;
  std::uint64_t labels_spent;
  std::vector<TrajectoryPoint> trajectory;
  PsgdBudgetExhausted(std::uint64_t steps, std::uint64_t labels,
                      std::vector<TrajectoryPoint> traj)
      : std::runtime_error("label budget exhausted during PSGD"),
        steps_completed(steps), labels_spent(labels), trajectory(std::move(traj)) {}
};

// sample_rng drives x draws and Bernoulli gates; select_rng supplies the index
// R and, for random init, w_0. init overrides cfg.init when provided.
PsgdResult active_psgd(const PsgdConfig& cfg, const MarginalDistribution& dist,
                       LabelingOracle& oracle, RandomStream& sample_rng,
                       RandomStream& select_rng,
                       const std::optional<UnitVector>& init = std::nullopt);

}  // namespace alh
