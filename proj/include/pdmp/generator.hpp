#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pdmp/kernel.hpp"

namespace pdmp {

/// Finite set of positive speeds with the intensity matrix of the chain that
/// switches between them. Row i of `q` belongs to `speeds[i]`.
struct SwitchingGenerator {
  std::vector<double> speeds;
  Eigen::MatrixXd q;

  // Set on generators built by tilted_generator(): speeds are reciprocals,
  // stored in the row order of the source (hence decreasing), and tilting
  // again hands back the source unchanged.
  std::shared_ptr<const SwitchingGenerator> tilt_source;

  std::size_t size() const noexcept { return speeds.size(); }
  double max_speed() const;
  bool reciprocal() const noexcept { return tilt_source != nullptr; }
};

/// Weights over an explicit support; weight i belongs to support[i].
struct ProbabilityVector {
  std::vector<double> support;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

/// Throws Error with RowSumNonzero, NegativeOffDiagonal, Reducible,
/// NonpositiveSpeed or UnorderedSpeeds.
void validate_generator(const SwitchingGenerator& g);

/// Stationary law pi with pi Q = 0, from a dense LU solve of Q^T with its last
/// row replaced by the normalisation constraint.
ProbabilityVector invariant_measure(const SwitchingGenerator& g);

/// V^{-1} Q on the reciprocal speeds, rows in the same order as `g`.
SwitchingGenerator tilted_generator(const SwitchingGenerator& g);

/// pi*: the invariant law of the tilted generator. Support is {1/y}, weight i
/// refers to speeds[i].
ProbabilityVector boundary_speed_measure(const SwitchingGenerator& g);

/// pi* re-labelled onto the speeds themselves (support = speeds).
ProbabilityVector boundary_speed_law_on_speeds(const SwitchingGenerator& g);

/// Sum_y y pi(y).
double averaged_drift(const SwitchingGenerator& g);

/// Sum_y (1/y) pi*(1/y); the reciprocal of averaged_drift().
double pistar_first_moment(const SwitchingGenerator& g);

/// Mixture of kernels[i] with weight pi*(1/speeds[i]).
JumpKernel averaged_jump_kernel(const SwitchingGenerator& g, std::span<const JumpKernel> kernels);

/// Hitting times of the averaged process: T_k = T_{k-1} + (c - xi_{k-1}) / drift,
/// starting from T_0 = 0 (not included in the output).
std::vector<double> averaged_hitting_times(double drift, double c, std::span<const double> xi);

/// One step of the recursion above, shared with the averaged simulator so both
/// produce bit-identical times.
inline double next_averaged_hit(double previous, double drift, double c, double xi) {
  return previous + (c - xi) / drift;
}

}  // namespace pdmp
