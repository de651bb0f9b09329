#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdmp/ctmc.hpp"
#include "pdmp/generator.hpp"
#include "pdmp/process.hpp"
#include "pdmp/stats.hpp"

namespace pdmp {

/// Counts over a sorted finite support.
struct EmpiricalLaw {
  std::vector<double> support;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  ProbabilityVector frequencies() const;
};

/// Law of the pre-jump speeds in `records`. Throws EmptyInput.
EmpiricalLaw prejump_speed_law(std::span<const HittingRecord> records);

/// Half the L1 distance over the union of both supports.
double tv_distance(const ProbabilityVector& a, const ProbabilityVector& b);
double tv_distance(const EmpiricalLaw& a, const ProbabilityVector& b);

/// Rough standard error of tv_distance(empirical, reference) for n iid draws:
/// half the sum of binomial standard errors.
double tv_standard_error(const ProbabilityVector& reference, std::size_t n);

/// Mean of (X(t1) - X(t0)) / (t1 - t0) over the paths. Throws
/// WindowContainsHit if some path jumps in (0, t1].
Estimate drift_estimate(std::span<const CadlagPath> paths, double t0, double t1);

/// Kolmogorov-Smirnov distance between the sample's ECDF and a reference
/// CDF, using left limits so atoms are handled exactly. Throws EmptyInput.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf,
                    const std::function<double(double)>& cdf_left);

/// 1.36 / sqrt(n) and 1.95 / sqrt(n): asymptotic KS critical values at the
/// 0.05 and 0.001 levels.
double ks_critical_05(std::size_t n);
double ks_critical_001(std::size_t n);

/// Finite-dimensional query on the averaged hitting structure:
/// P(T_i <= times[i], Z_i = speeds[i] for i < k, exactly k hits in [0, T]).
/// Times may be +infinity. k = 0 asks for no hit before T.
struct LimitLawQuery {
  std::vector<double> times;
  std::vector<double> speeds;
  std::size_t k = 1;
  double horizon = 1.0;
};

/// Closed form for Dirac initial law and Dirac kernels. Throws
/// UnsupportedKernel otherwise and ConfigInvalid for a malformed query.
double limit_law_probability(const SwitchingGenerator& g, double c, const JumpKernel& initial,
                             std::span<const JumpKernel> kernels, const LimitLawQuery& q);

/// TV distance between the mean occupation vector on [0,t] and pi, with the
/// standard error propagated from per-state replica variances.
Estimate occupation_vs_pi(std::span<const SwitchPath> paths, const SwitchingGenerator& g, double t);

/// One line of an experiment summary.
struct EstimatorResult {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::optional<double> reference;
  std::optional<bool> pass;
};

}  // namespace pdmp
