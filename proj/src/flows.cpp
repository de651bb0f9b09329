#include "pdmp/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdmp/error.hpp"

namespace pdmp {

namespace {

void check_spec(const FlowSpec& spec) {
  if (!(spec.m < spec.c)) throw Error(Errc::ConfigInvalid, "flow needs m < c");
  for (double a : spec.alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw Error(Errc::ConfigInvalid, "alpha must be positive and finite");
}

JumpKernel push_through(const JumpKernel& k, const Homeomorphism& g) {
  if (const auto* d = std::get_if<Dirac>(&k.variant())) return JumpKernel::dirac(g.forward(d->at));
  return JumpKernel::pushforward(k, g.forward, g.inverse);
}

void check_support(const JumpKernel& k, double lo, double hi, const std::string& what) {
  if (!(k.lower() >= lo && k.upper() <= hi))
    throw Error(Errc::KernelSupportViolation, what + " leaves (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
}

}  // namespace

Homeomorphism build_homeomorphism(const FlowSpec& spec) {
  check_spec(spec);
  const double m = spec.m;
  const double c = spec.c;
  Homeomorphism h;
  if (std::holds_alternative<QuadraticF>(spec.f)) {
    if (m <= 0.0 && c >= 0.0) throw Error(Errc::NonIntegrableF, "1/x^2 is not integrable across 0");
    h.forward = [m](double x) { return 1.0 / m - 1.0 / x; };
    h.inverse = [m](double z) { return 1.0 / (1.0 / m - z); };
  } else {
    const auto& t = std::get<TabulatedF>(spec.f);
    if (!t.g || !t.g_inv) throw Error(Errc::ConfigInvalid, "tabulated F needs G and its inverse");
    h.forward = t.g;
    h.inverse = t.g_inv;
  }
  h.upper = h.forward(c);
  if (!std::isfinite(h.upper)) throw Error(Errc::NonIntegrableF, "G(c) is not finite");

  if (std::holds_alternative<TabulatedF>(spec.f)) {
    constexpr int kGrid = 1000;
    double previous = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kGrid; ++i) {
      const double x = m + (c - m) * i / (kGrid + 1.0);
      const double z = h.forward(x);
      const double back = h.inverse(z);
      const double again = h.forward(h.inverse(z));
      if (!(std::abs(back - x) <= 1e-12 * std::max(1.0, std::abs(x))) ||
          !(std::abs(again - z) <= 1e-12 * std::max(1.0, std::abs(z))))
        throw Error(Errc::RoundTripFailure, "G and G^-1 disagree at x = " + std::to_string(x));
      if (!(z > previous)) throw Error(Errc::RoundTripFailure, "G is not strictly increasing");
      previous = z;
    }
  }
  return h;
}

ProcessConfig reduce_to_linear(const FlowConfig& cfg) {
  const auto& p = cfg.process;
  const auto& spec = cfg.flow;
  const Homeomorphism g = build_homeomorphism(spec);
  const std::size_t n = p.generator.size();
  if (spec.alpha.size() != n) throw Error(Errc::ConfigInvalid, "need one alpha per speed");
  if (p.kernels.size() != n) throw Error(Errc::ConfigInvalid, "need one kernel per speed");
  if (p.boundary != spec.c) throw Error(Errc::ConfigInvalid, "process boundary must equal the flow's c");
  if (!(p.gap > 0.0 && p.gap < spec.c - spec.m)) throw Error(Errc::ConfigInvalid, "gap must lie in (0, c - m)");

  const double top = spec.c - p.gap;
  for (std::size_t i = 0; i < n; ++i) check_support(p.kernels[i], spec.m, top, "kernel " + std::to_string(i));
  if (!(p.initial.lower() >= spec.m && p.initial.upper() < spec.c))
    throw Error(Errc::KernelSupportViolation, "initial law leaves [m, c)");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spec.alpha[a] < spec.alpha[b]; });
  for (std::size_t i = 1; i < n; ++i)
    if (spec.alpha[order[i]] == spec.alpha[order[i - 1]])
      throw Error(Errc::ConfigInvalid, "alpha must take distinct values");

  ProcessConfig out = p;
  out.generator.speeds.resize(n);
  out.generator.q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.generator.tilt_source.reset();
  out.kernels.clear();
  for (std::size_t i = 0; i < n; ++i) {
    out.generator.speeds[i] = spec.alpha[order[i]];
    for (std::size_t j = 0; j < n; ++j)
      out.generator.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          p.generator.q(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
    out.kernels.push_back(push_through(p.kernels[order[i]], g));
  }
  if (const auto* idx = std::get_if<std::size_t>(&p.initial_state)) {
    out.initial_state = static_cast<std::size_t>(std::find(order.begin(), order.end(), *idx) - order.begin());
  } else if (const auto* law = std::get_if<ProbabilityVector>(&p.initial_state)) {
    ProbabilityVector permuted;
    for (std::size_t i = 0; i < n; ++i) {
      permuted.support.push_back(out.generator.speeds[i]);
      permuted.weights.push_back(law->weights.at(order[i]));
    }
    out.initial_state = permuted;
  }

  out.initial = push_through(p.initial, g);
  out.boundary = g.upper;
  // Largest gap whose image of the kernel ceiling stays inside the linear model.
  double gap = g.upper - g.forward(top);
  for (const auto& k : out.kernels) {
    while (gap > 0.0 && k.upper() > out.boundary - gap) gap = std::nextafter(gap, 0.0);
  }
  if (!(gap > 0.0)) throw Error(Errc::KernelSupportViolation, "reduced gap is not positive");
  out.gap = gap;
  return out;
}

double FlowPath::value(double t, Side side) const { return g.inverse(path_value(z, t, side)); }

std::vector<HittingRecord> FlowPath::hits() const {
  std::vector<HittingRecord> out;
  out.reserve(z.jumps.size());
  for (const auto& h : z.jumps) {
    const auto it = std::find(rates.begin(), rates.end(), h.prejump_speed);
    const double y = it == rates.end() ? h.prejump_speed : labels[static_cast<std::size_t>(it - rates.begin())];
    out.push_back(HittingRecord{h.index, h.time, y, g.inverse(h.postjump_value)});
  }
  return out;
}

FlowPath simulate_flow(const FlowConfig& cfg, const RngStream& rng) {
  const ProcessConfig reduced = reduce_to_linear(cfg);
  FlowPath out;
  out.z = simulate_constrained(reduced, rng);
  out.g = build_homeomorphism(cfg.flow);
  out.rates = reduced.generator.speeds;
  for (double a : out.rates) {
    const auto it = std::find(cfg.flow.alpha.begin(), cfg.flow.alpha.end(), a);
    out.labels.push_back(cfg.process.generator.speeds[static_cast<std::size_t>(it - cfg.flow.alpha.begin())]);
  }
  return out;
}

FlowConfig quadratic_if_preset(double m, double c, double gap, std::vector<JumpKernel> kernels) {
  FlowConfig cfg;
  auto& p = cfg.process;
  p.generator.speeds = {1.0, 2.0};
  p.generator.q.resize(2, 2);
  p.generator.q << -1.0, 1.0, 2.0, -2.0;
  p.boundary = c;
  p.gap = gap;
  p.initial = JumpKernel::dirac(m + gap);
  p.kernels = kernels.empty() ? std::vector<JumpKernel>{JumpKernel::uniform(m, c - gap), JumpKernel::uniform(m, c - gap)}
                              : std::move(kernels);
  p.epsilon = 1e-3;
  p.horizon = 10.0;
  cfg.flow.m = m;
  cfg.flow.c = c;
  cfg.flow.alpha = {1.0, 4.0};
  cfg.flow.f = QuadraticF{};
  return cfg;
}

}  // namespace pdmp
