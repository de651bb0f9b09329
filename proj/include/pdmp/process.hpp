#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pdmp/ctmc.hpp"
#include "pdmp/generator.hpp"
#include "pdmp/kernel.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

/// Everything needed to simulate one boundary-constrained linear process.
struct ProcessConfig {
  SwitchingGenerator generator;
  double boundary = 1.0;
  JumpKernel initial = JumpKernel::dirac(0.0);  // law of the starting point
  InitialState initial_state = Stationary{};    // law of the starting speed
  std::vector<JumpKernel> kernels;              // kernels[i] used after a hit at speeds[i]
  double epsilon = 1.0;
  double horizon = 1.0;
  double gap = 1.0;  // every kernel lives on (-inf, boundary - gap]
};

/// Throws Error(ConfigInvalid) when a ProcessConfig invariant fails.
void validate_config(const ProcessConfig& cfg);

/// Deterministic ceiling on the number of boundary hits in [0, horizon]:
/// horizon * max speed / gap, plus one when the initial law may start closer
/// than `gap` to the boundary.
double hit_count_bound(const ProcessConfig& cfg);

/// Linear motion on [t_start, t_end] from x_start to x_end at `slope`.
struct Segment {
  double t_start;
  double x_start;
  double slope;
  double t_end;
  double x_end;
};

struct HittingRecord {
  std::size_t index;  // 1-based jump number
  double time;
  double prejump_speed;
  double postjump_value;
};

enum class PathKind { Constrained, Averaged, Penalized, Mirror };

/// Piecewise-linear cadlag trajectory: contiguous segments plus the jump log.
/// Segments that start at a jump time begin at that jump's post-jump value.
struct CadlagPath {
  std::vector<Segment> segments;
  std::vector<HittingRecord> jumps;
  double horizon = 0.0;
  double boundary = 0.0;
  PathKind kind = PathKind::Constrained;

  /// p*(t): number of jumps with time <= t.
  std::size_t jump_count(double t) const;
};

/// Value at t, or its left limit. O(log #segments).
double path_value(const CadlagPath& path, double t, Side side = Side::Right);

/// X_eps driven by a given switching realisation. `xi0` is the start point and
/// `jump_rng` supplies one uniform per hit, in hit order.
CadlagPath run_constrained(const ProcessConfig& cfg, const SwitchPath& switching, double xi0, RngStream& jump_rng);

/// X_eps: exact event-driven simulation. Uses the Switching, Initial and
/// JumpTarget lanes of `rng`.
CadlagPath simulate_constrained(const ProcessConfig& cfg, const RngStream& rng);

/// The averaged limit: constant slope sum_y y pi(y), hits by the closed-form
/// recursion, post-jump values from the averaged kernel. The recorded
/// pre-jump speed is the mixture component chosen, distributed as pi*.
CadlagPath simulate_averaged(const ProcessConfig& cfg, const RngStream& rng);

/// M_eps(x) = int_0^x W_eps(u) du with W_eps the reciprocal-speed chain of the
/// tilted generator, run in the space variable up to `x_horizon`.
CadlagPath simulate_mirror(const ProcessConfig& cfg, const RngStream& rng, double x_horizon);

/// The mirror path read off an existing time-domain switching realisation:
/// space advances by y dt while the mirror advances by dt. Hits of the
/// constrained process at level sum_{j<i}(c - xi_j) in space map to T*_i.
CadlagPath mirror_readout(const SwitchingGenerator& g, const SwitchPath& switching);

/// Path CSV `t,x,kind` with kind in {segment_start, hit, jump_target, horizon}.
void write_path_csv(std::ostream& out, const CadlagPath& path);
/// Same, with every x passed through `map` (e.g. back to flow coordinates).
void write_path_csv(std::ostream& out, const CadlagPath& path, const std::function<double(double)>& map);

/// Hitting-record CSV header and rows.
void write_hits_header(std::ostream& out);
void write_hits_rows(std::ostream& out, std::size_t replica, const std::vector<HittingRecord>& hits);

}  // namespace pdmp
