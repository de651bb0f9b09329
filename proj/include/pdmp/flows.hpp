#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "pdmp/process.hpp"

namespace pdmp {

/// F(x) = x^2.
struct QuadraticF {};

/// User-supplied F with a closed-form primitive G(x) = int_m^x du / F(u) and
/// its inverse.
struct TabulatedF {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> g;
  std::function<double(double)> g_inv;
};

/// Motion x' = alpha(y) F(x) on (m, c). alpha[i] belongs to the i-th speed of
/// the accompanying generator.
struct FlowSpec {
  double m = 1.0;
  double c = 2.0;
  std::vector<double> alpha;
  std::variant<QuadraticF, TabulatedF> f = QuadraticF{};
};

struct Homeomorphism {
  std::function<double(double)> forward;  // G: (m,c) -> (0, G(c))
  std::function<double(double)> inverse;
  double upper = 0.0;  // G(c)
};

/// Throws NonIntegrableF when G(c) is not finite and RoundTripFailure when a
/// tabulated pair is not mutually inverse to 1e-12 on a 1000-point grid.
Homeomorphism build_homeomorphism(const FlowSpec& spec);

/// A process in X-coordinates: `process.generator.speeds` are the labels y,
/// `process.boundary` must equal `flow.c`, kernels and initial law live in
/// (m, c - gap).
struct FlowConfig {
  ProcessConfig process;
  FlowSpec flow;
};

/// The linear process Z = G(X): speeds alpha(y) (states re-ordered so they
/// increase), boundary G(c), gap G(c) - G(c - gap), every law pushed through G.
/// Q is unchanged apart from that permutation. Throws KernelSupportViolation.
ProcessConfig reduce_to_linear(const FlowConfig& cfg);

/// Z simulated exactly and read back through G^{-1}.
struct FlowPath {
  CadlagPath z;
  Homeomorphism g;
  std::vector<double> labels;  // y for each reduced state, by its speed alpha(y)
  std::vector<double> rates;

  double value(double t, Side side = Side::Right) const;
  /// Hits in X-coordinates: same times, pre-jump label y, post-jump G^{-1}(z).
  std::vector<HittingRecord> hits() const;
};

FlowPath simulate_flow(const FlowConfig& cfg, const RngStream& rng);

/// x(t) = x0 / (1 - a x0 t) for x' = a x^2.
inline double quadratic_flow_value(double x0, double a, double t) { return x0 / (1.0 - a * x0 * t); }

/// Time for x' = a x^2 to reach c from x0.
inline double quadratic_hit_time(double x0, double a, double c) { return (1.0 / x0 - 1.0 / c) / a; }

/// Slow-fast quadratic integrate-and-fire model: y in {1,2}, alpha(y) = y^2,
/// Q = [[-1,1],[2,-2]], kernels uniform on (m, c - gap) unless supplied.
FlowConfig quadratic_if_preset(double m = 1.0, double c = 2.0, double gap = 0.25,
                               std::vector<JumpKernel> kernels = {});

}  // namespace pdmp
