#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pdmp/generator.hpp"
#include "pdmp/process.hpp"

namespace fixtures {

// Speeds {1,4} with Q = [[-1,1],[2,-2]].
inline pdmp::SwitchingGenerator quadratic_z_generator() {
  pdmp::SwitchingGenerator g;
  g.speeds = {1.0, 4.0};
  g.q.resize(2, 2);
  g.q << -1.0, 1.0, 2.0, -2.0;
  return g;
}

inline pdmp::SwitchingGenerator single_speed(double y) {
  pdmp::SwitchingGenerator g;
  g.speeds = {y};
  g.q = Eigen::MatrixXd::Zero(1, 1);
  return g;
}

// c = 1, start and reset at 0, gap 1.
inline pdmp::ProcessConfig quadratic_z_config(double epsilon, double horizon) {
  pdmp::ProcessConfig cfg;
  cfg.generator = quadratic_z_generator();
  cfg.boundary = 1.0;
  cfg.gap = 1.0;
  cfg.initial = pdmp::JumpKernel::dirac(0.0);
  cfg.kernels = {pdmp::JumpKernel::dirac(0.0), pdmp::JumpKernel::dirac(0.0)};
  cfg.epsilon = epsilon;
  cfg.horizon = horizon;
  return cfg;
}

// Random irreducible generator on n states: a directed cycle with positive
// rates keeps it irreducible, the other edges are switched on at random.
inline pdmp::SwitchingGenerator random_generator(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> rate(0.05, 5.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_real_distribution<double> step(0.1, 3.0);
  pdmp::SwitchingGenerator g;
  double y = std::uniform_real_distribution<double>(0.1, 2.0)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    g.speeds.push_back(y);
    y += step(rng);
  }
  const auto m = static_cast<Eigen::Index>(n);
  g.q = Eigen::MatrixXd::Zero(m, m);
  if (n == 1) return g;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const bool cycle_edge = j == (i + 1) % m;
      if (cycle_edge || coin(rng) < 0.4) g.q(i, j) = rate(rng);
    }
    g.q(i, i) = -(g.q.row(i).sum());
  }
  return g;
}

// Stationary law by power iteration on the uniformised chain P = I + Q / L.
// Shares nothing with the LU solve it checks.
inline std::vector<double> power_iteration_pi(const Eigen::MatrixXd& q) {
  const auto n = q.rows();
  const double lambda = 1.05 * q.diagonal().cwiseAbs().maxCoeff() + 1e-300;
  const Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) + q / lambda;
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 200000; ++it) {
    Eigen::RowVectorXd next = v * p;
    next /= next.sum();
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (delta < 1e-16) break;
  }
  return {v.data(), v.data() + n};
}

}  // namespace fixtures
