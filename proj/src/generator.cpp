#include "pdmp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdmp/error.hpp"

namespace pdmp {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kEdgeThreshold = 1e-14;

std::vector<bool> reachable(const Eigen::MatrixXd& q, bool transpose) {
  const auto n = static_cast<std::size_t>(q.rows());
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || seen[j]) continue;
      const double w = transpose ? q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))
                                 : q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w > kEdgeThreshold) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

double SwitchingGenerator::max_speed() const {
  return speeds.empty() ? 0.0 : *std::max_element(speeds.begin(), speeds.end());
}

void validate_generator(const SwitchingGenerator& g) {
  const std::size_t n = g.size();
  if (n == 0) throw Error(Errc::NonpositiveSpeed, "empty speed set");
  if (static_cast<std::size_t>(g.q.rows()) != n || static_cast<std::size_t>(g.q.cols()) != n)
    throw Error(Errc::RowSumNonzero, "intensity matrix shape does not match speed count");

  for (std::size_t i = 0; i < n; ++i) {
    if (!(g.speeds[i] > 0.0) || !std::isfinite(g.speeds[i]))
      throw Error(Errc::NonpositiveSpeed, "speed " + std::to_string(i) + " is not a positive finite number");
  }
  for (std::size_t i = 1; i < n; ++i) {
    const bool ordered = g.reciprocal() ? g.speeds[i] < g.speeds[i - 1] : g.speeds[i] > g.speeds[i - 1];
    if (!ordered) throw Error(Errc::UnorderedSpeeds, "speeds must be strictly increasing");
  }

  for (Eigen::Index i = 0; i < g.q.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < g.q.cols(); ++j) {
      const double v = g.q(i, j);
      if (!std::isfinite(v)) throw Error(Errc::RowSumNonzero, "non-finite intensity");
      if (i != j && v < 0.0)
        throw Error(Errc::NegativeOffDiagonal,
                    "q(" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
      sum += v;
    }
    const double scale = std::max(1.0, std::abs(g.q(i, i)));
    if (std::abs(sum) > kRowSumTolerance * scale)
      throw Error(Errc::RowSumNonzero, "row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }

  if (n > 1) {
    const auto fwd = reachable(g.q, false);
    const auto bwd = reachable(g.q, true);
    for (std::size_t i = 0; i < n; ++i)
      if (!fwd[i] || !bwd[i]) throw Error(Errc::Reducible, "state " + std::to_string(i) + " not mutually reachable");
  }
}

ProbabilityVector invariant_measure(const SwitchingGenerator& g) {
  validate_generator(g);
  const auto n = static_cast<Eigen::Index>(g.size());
  ProbabilityVector pi{g.speeds, {}};
  if (n == 1) {
    pi.weights = {1.0};
    return pi;
  }

  Eigen::MatrixXd a = g.q.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < n) throw Error(Errc::SingularSystem, "stationary system is rank deficient");
  const Eigen::VectorXd x = lu.solve(b);

  pi.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = x(i);
    if (!std::isfinite(w) || w < -1e-10) throw Error(Errc::SingularSystem, "solve produced a negative weight");
    pi.weights[static_cast<std::size_t>(i)] = std::max(w, 0.0);
  }
  return pi;
}

SwitchingGenerator tilted_generator(const SwitchingGenerator& g) {
  validate_generator(g);
  if (g.tilt_source) return *g.tilt_source;

  SwitchingGenerator t;
  t.speeds.resize(g.size());
  t.q = g.q;
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.speeds[i] = 1.0 / g.speeds[i];
    t.q.row(static_cast<Eigen::Index>(i)) /= g.speeds[i];
  }
  t.tilt_source = std::make_shared<const SwitchingGenerator>(g);
  return t;
}

ProbabilityVector boundary_speed_measure(const SwitchingGenerator& g) {
  return invariant_measure(tilted_generator(g));
}

ProbabilityVector boundary_speed_law_on_speeds(const SwitchingGenerator& g) {
  auto p = boundary_speed_measure(g);
  p.support = g.speeds;
  return p;
}

double averaged_drift(const SwitchingGenerator& g) {
  const auto pi = invariant_measure(g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.speeds[i] * pi[i];
  return s;
}

double pistar_first_moment(const SwitchingGenerator& g) {
  const auto ps = boundary_speed_measure(g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += ps.support[i] * ps[i];
  return s;
}

JumpKernel averaged_jump_kernel(const SwitchingGenerator& g, std::span<const JumpKernel> kernels) {
  validate_generator(g);
  if (kernels.size() < g.size())
    throw Error(Errc::MissingKernel, "no kernel for speed " + std::to_string(g.speeds[kernels.size()]));
  const auto ps = boundary_speed_measure(g);
  Mixture m;
  m.components.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) m.components.push_back(MixtureComponent{ps[i], kernels[i]});
  return JumpKernel(std::move(m));
}

std::vector<double> averaged_hitting_times(double drift, double c, std::span<const double> xi) {
  if (!(drift > 0.0)) throw Error(Errc::NonpositiveDrift, "drift must be positive");
  std::vector<double> out;
  out.reserve(xi.size());
  double t = 0.0;
  for (const double x : xi) {
    if (!(x < c)) throw Error(Errc::XiAboveBoundary, "post-jump value at or above the boundary");
    t = next_averaged_hit(t, drift, c, x);
    out.push_back(t);
  }
  return out;
}

}  // namespace pdmp
