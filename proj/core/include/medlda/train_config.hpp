#pragma once

#include <cstdint>

#include "medlda/var_core.hpp"

namespace medlda {

// How the per-token phi update picks the multiplier of the margin term.
enum class DualCoupling {
  // Each phi row is the exact minimizer of the training objective with the
  // other rows fixed: the multiplier is the one consistent with that row's
  // own margin state. Keeps the objective trace monotone.
  kExactCoordinate,
  // Multipliers from the previous iteration's dual solve, held fixed for
  // the whole E-step.
  kPreviousDuals,
};

struct TrainConfig {
  int topics = 10;
  double c = 1.0;
  double epsilon = 0.1;
  int em_max_iter = 50;
  double em_rel_tol = 1e-4;
  InnerSchedule inner;
  double solver_tol = 1e-9;
  std::uint64_t seed = 0;
  int threads = 1;
  DualCoupling coupling = DualCoupling::kExactCoordinate;

  void validate() const;
};

}  // namespace medlda
