#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "pdmp/generator.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

/// Start the chain from its invariant law.
struct Stationary {};

using InitialState = std::variant<Stationary, std::size_t, ProbabilityVector>;

/// Which side of a discontinuity to read: the value itself (right-continuous)
/// or the left limit.
enum class Side { Right, Left };

struct SwitchEvent {
  double time;
  std::size_t state;
};

/// One realisation of the (accelerated) switching chain on [0, horizon].
struct SwitchPath {
  std::size_t initial_state = 0;
  std::vector<SwitchEvent> events;
  double horizon = 0.0;
};

/// Y_eps(t) = Y(t/eps): holding rate in state i is -q_ii / eps.
SwitchPath simulate_switching(const SwitchingGenerator& g, const InitialState& init, double epsilon,
                              double horizon, RngStream rng);

/// Draws the initial state index from an InitialState spec.
std::size_t draw_initial_state(const SwitchingGenerator& g, const InitialState& init, RngStream& rng);

/// Cadlag evaluation; Side::Left gives Y(t-).
std::size_t state_at(const SwitchPath& path, double t, Side side = Side::Right);

/// Fraction of [0,t] spent in each state (t > 0); the empty interval reports
/// the initial state.
std::vector<double> occupation_measure(const SwitchPath& path, std::size_t n_states, double t);

/// CSV with header `t,new_state`, 17 significant digits.
void write_switch_csv(std::ostream& out, const SwitchPath& path);

}  // namespace pdmp
