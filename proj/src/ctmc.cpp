#include "pdmp/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"

namespace pdmp {

std::size_t draw_initial_state(const SwitchingGenerator& g, const InitialState& init, RngStream& rng) {
  if (const auto* idx = std::get_if<std::size_t>(&init)) {
    if (*idx >= g.size()) throw Error(Errc::ConfigInvalid, "initial state index out of range");
    return *idx;
  }
  if (const auto* law = std::get_if<ProbabilityVector>(&init)) {
    if (law->size() != g.size()) throw Error(Errc::ConfigInvalid, "initial law size mismatch");
    return rng.discrete(law->weights);
  }
  const auto pi = invariant_measure(g);
  return rng.discrete(pi.weights);
}

SwitchPath simulate_switching(const SwitchingGenerator& g, const InitialState& init, double epsilon,
                              double horizon, RngStream rng) {
  validate_generator(g);
  if (!(epsilon > 0.0) || !(horizon > 0.0)) throw Error(Errc::ConfigInvalid, "epsilon and horizon must be positive");

  const std::size_t n = g.size();
  // Per-row exit rates and cumulative jump-chain tables.
  std::vector<double> rate(n);
  std::vector<std::vector<double>> cumulative(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    rate[i] = -g.q(ii, ii) / epsilon;
    double cum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cum += g.q(ii, static_cast<Eigen::Index>(j));
      cumulative[i][j] = cum;
    }
    if (n > 1 && !(rate[i] > 0.0)) throw Error(Errc::AbsorbingState, "state " + std::to_string(i) + " is absorbing");
  }

  SwitchPath path;
  path.horizon = horizon;
  path.initial_state = draw_initial_state(g, init, rng);
  if (n == 1) return path;

  double t = 0.0;
  std::size_t state = path.initial_state;
  for (;;) {
    t += rng.exponential(rate[state]);
    if (!std::isfinite(t)) throw Error(Errc::NonfiniteTime, "switch time overflow");
    if (t > horizon) break;
    const auto& cum = cumulative[state];
    const double target = rng.uniform() * cum[n - 1];
    std::size_t next = state;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == state) continue;
      if (g.q(static_cast<Eigen::Index>(state), static_cast<Eigen::Index>(j)) <= 0.0) continue;
      next = j;
      if (target < cum[j]) break;
    }
    state = next;
    path.events.push_back(SwitchEvent{t, state});
  }
  return path;
}

std::size_t state_at(const SwitchPath& path, double t, Side side) {
  if (!(t >= 0.0 && t <= path.horizon)) throw Error(Errc::OutOfHorizon, "t outside [0, horizon]");
  const auto& ev = path.events;
  auto it = side == Side::Right
                ? std::upper_bound(ev.begin(), ev.end(), t, [](double v, const SwitchEvent& e) { return v < e.time; })
                : std::lower_bound(ev.begin(), ev.end(), t, [](const SwitchEvent& e, double v) { return e.time < v; });
  if (it == ev.begin()) return path.initial_state;
  return std::prev(it)->state;
}

std::vector<double> occupation_measure(const SwitchPath& path, std::size_t n_states, double t) {
  if (!(t >= 0.0 && t <= path.horizon)) throw Error(Errc::OutOfHorizon, "t outside [0, horizon]");
  std::vector<double> occ(n_states, 0.0);
  if (t == 0.0) {
    occ[path.initial_state] = 1.0;
    return occ;
  }
  double last = 0.0;
  std::size_t state = path.initial_state;
  for (const auto& e : path.events) {
    if (e.time >= t) break;
    occ[state] += e.time - last;
    last = e.time;
    state = e.state;
  }
  occ[state] += t - last;
  for (auto& v : occ) v /= t;
  return occ;
}

void write_switch_csv(std::ostream& out, const SwitchPath& path) {
  out << "t,new_state\n";
  out << format_real(0.0) << ',' << path.initial_state << '\n';
  for (const auto& e : path.events) out << format_real(e.time) << ',' << e.state << '\n';
}

}  // namespace pdmp
