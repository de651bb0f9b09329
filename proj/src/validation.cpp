#include "pdmp/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"

namespace pdmp {

ProbabilityVector EmpiricalLaw::frequencies() const {
  ProbabilityVector p;
  p.support = support;
  for (std::size_t c : counts) p.weights.push_back(total ? static_cast<double>(c) / static_cast<double>(total) : 0.0);
  return p;
}

EmpiricalLaw prejump_speed_law(std::span<const HittingRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no hitting records");
  std::map<double, std::size_t> tally;
  for (const auto& r : records) ++tally[r.prejump_speed];
  EmpiricalLaw law;
  for (const auto& [v, n] : tally) {
    law.support.push_back(v);
    law.counts.push_back(n);
  }
  law.total = records.size();
  return law;
}

double tv_distance(const ProbabilityVector& a, const ProbabilityVector& b) {
  std::map<double, double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) diff[a.support[i]] += a.weights[i];
  for (std::size_t i = 0; i < b.size(); ++i) diff[b.support[i]] -= b.weights[i];
  CompensatedSum s;
  for (const auto& [v, d] : diff) s.add(std::abs(d));
  return 0.5 * s.value();
}

double tv_distance(const EmpiricalLaw& a, const ProbabilityVector& b) { return tv_distance(a.frequencies(), b); }

double tv_standard_error(const ProbabilityVector& reference, std::size_t n) {
  if (n == 0) throw Error(Errc::EmptyInput, "no draws");
  double s = 0.0;
  for (double p : reference.weights) s += std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return 0.5 * s;
}

Estimate drift_estimate(std::span<const CadlagPath> paths, double t0, double t1) {
  if (paths.empty()) throw Error(Errc::EmptyInput, "no paths");
  if (!(t0 >= 0.0 && t1 > t0)) throw Error(Errc::ConfigInvalid, "window must satisfy 0 <= t0 < t1");
  std::vector<double> slopes;
  slopes.reserve(paths.size());
  for (const auto& p : paths) {
    if (p.jump_count(t1) > 0) throw Error(Errc::WindowContainsHit, "a path hits the boundary inside the window");
    slopes.push_back((path_value(p, t1) - path_value(p, t0)) / (t1 - t0));
  }
  return mean_and_error(slopes);
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf,
                    const std::function<double(double)>& cdf_left) {
  if (sample.empty()) throw Error(Errc::EmptyInput, "empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  double below = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double at = static_cast<double>(j) / n;
    d = std::max({d, std::abs(at - cdf(v[i])), std::abs(below - cdf_left(v[i]))});
    below = at;
    i = j;
  }
  return d;
}

double ks_critical_05(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

double ks_critical_001(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

double limit_law_probability(const SwitchingGenerator& g, double c, const JumpKernel& initial,
                             std::span<const JumpKernel> kernels, const LimitLawQuery& q) {
  const auto* u0 = std::get_if<Dirac>(&initial.variant());
  if (!u0) throw Error(Errc::UnsupportedKernel, "initial law must be a point mass");
  if (kernels.size() != g.size()) throw Error(Errc::ConfigInvalid, "need one kernel per speed");
  for (const auto& k : kernels)
    if (!k.is_dirac()) throw Error(Errc::UnsupportedKernel, "kernels must be point masses");
  if (q.times.size() != q.k || q.speeds.size() != q.k) throw Error(Errc::ConfigInvalid, "query sizes must equal k");
  for (std::size_t i = 1; i < q.k; ++i)
    if (q.times[i] < q.times[i - 1]) throw Error(Errc::ConfigInvalid, "query times must be nondecreasing");

  const ProbabilityVector pistar = boundary_speed_law_on_speeds(g);
  const double e = pistar_first_moment(g);
  double weight = 1.0;
  double consumed = c - u0->at;  // sum over j < i of (c - u_j)
  for (std::size_t i = 0; i < q.k; ++i) {
    const auto it = std::find(g.speeds.begin(), g.speeds.end(), q.speeds[i]);
    if (it == g.speeds.end()) throw Error(Errc::ConfigInvalid, "query speed is not a state of the generator");
    const auto idx = static_cast<std::size_t>(it - g.speeds.begin());
    const double hit = consumed * e;
    if (!(hit <= q.times[i]) || !(hit <= q.horizon)) return 0.0;
    weight *= pistar[idx];
    consumed += c - std::get<Dirac>(kernels[idx].variant()).at;
  }
  if (!(consumed * e > q.horizon)) return 0.0;
  return weight;
}

Estimate occupation_vs_pi(std::span<const SwitchPath> paths, const SwitchingGenerator& g, double t) {
  if (paths.empty()) throw Error(Errc::EmptyInput, "no switching paths");
  if (!(t > 0.0)) throw Error(Errc::ConfigInvalid, "t must be positive");
  const std::size_t n = g.size();
  std::vector<std::vector<double>> per_state(n);
  for (const auto& p : paths) {
    const auto occ = occupation_measure(p, n, t);
    for (std::size_t i = 0; i < n; ++i) per_state[i].push_back(occ[i]);
  }
  const ProbabilityVector pi = invariant_measure(g);
  double tv = 0.0;
  double se = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Estimate m = mean_and_error(per_state[i]);
    tv += std::abs(m.mean - pi[i]);
    se += m.std_error;
  }
  return Estimate{0.5 * tv, 0.5 * se, paths.size()};
}

}  // namespace pdmp
