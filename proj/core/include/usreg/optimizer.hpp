#pragma once

#include <array>
#include <functional>
#include <vector>

#include "usreg/transform.hpp"

namespace usreg {

enum class TerminationReason { x_tol, f_tol, max_evals };

/// What the simplex just did; reported through the iteration observer.
enum class SimplexStep {
  initial,
  reflect,
  expand,
  contract_outside,
  contract_inside,
  shrink,
};

struct SimplexConfig {
  /// Initial vertex offset per axis, in normalized units. The capture
  /// range of the registration problem bounds it above; one unit bounds
  /// it below, hence the [3,5] validity window.
  double initial_size_units = 4.0;
  bool allow_size_outside_range = false;

  double reflection = 1.0;   // rho
  double expansion = 2.0;    // chi
  double contraction = 0.5;  // gamma
  double shrink = 0.5;       // sigma

  int max_evals = 2000;
  double x_tol = 0.01;  // simplex diameter, units
  double f_tol = 1e-5;  // cost spread

  /// One restart from the best point with a fresh simplex.
  bool restart = false;

  void validate() const;
};

struct OptResult {
  ParamVector best_point{};
  double best_cost = 0.0;
  int evals = 0;
  TerminationReason termination = TerminationReason::max_evals;
};

using CostFunction = std::function<double(const ParamVector&)>;

/// Called after every iteration with the vertices ordered best-first.
using SimplexObserver =
    std::function<void(int iteration, SimplexStep step,
                       const std::vector<ParamVector>& vertices,
                       const std::vector<double>& costs)>;

/// Nelder-Mead simplex minimization over the 6-D normalized parameter
/// space: reflection / expansion / outside-inside contraction / shrink,
/// starting from x0 plus one vertex offset by initial_size_units along
/// each axis. Deterministic: vertex ordering ties break by insertion
/// index, so identical inputs give identical evaluation sequences.
OptResult minimize(const CostFunction& f, const ParamVector& x0,
                   const SimplexConfig& config = {},
                   const SimplexObserver& observer = nullptr);

namespace detail {
/// Shrink step geometry: every vertex except the best moves toward the
/// best by the shrink factor exactly.
void shrink_toward_best(std::vector<ParamVector>& vertices, std::size_t best,
                        double sigma);
}  // namespace detail

}  // namespace usreg
