#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "pdmp/process.hpp"
#include "pdmp/stats.hpp"

namespace pdmp {

/// Time spent above the boundary before one penalised jump.
struct Overshoot {
  double hit_time;
  double duration;   // exponential clock E_i with rate eps^{-k}
  double jump_time;  // hit_time + duration; may exceed the horizon
  double postjump_value;
  double speed_at_jump;
  bool completed;  // false when the horizon arrives before the clock rings
};

/// X^P: continues past the boundary and jumps after an Exp(eps^{-k}) delay.
/// `path.jumps` logs the penalised jumps (time = jump time, speed at jump).
struct PenalizedPath {
  CadlagPath path;
  std::vector<Overshoot> overshoots;
};

/// Increasing piecewise-linear map through its knots. Evaluation at a knot
/// returns the stored image exactly.
struct MonotoneMap {
  std::vector<double> x;
  std::vector<double> y;

  static MonotoneMap identity(double horizon);

  double operator()(double t) const;
  double inverse(double v) const;
  /// sup |map - Id|, attained at a knot.
  double sup_deviation() const;
  bool strictly_increasing() const;
};

/// lambda_eps(t) = int_0^t ds / (1 + eps^{-k} 1{X^P(s) >= c}).
using TimeChange = MonotoneMap;

/// mu_eps(t) = t - lambda_eps(t).
inline double time_change_complement(const TimeChange& lambda, double t) { return t - lambda(t); }

/// Penalised dynamics driven by a given switching realisation; overshoot
/// clocks come from `overshoot_rng`, post-jump uniforms from `jump_rng`.
PenalizedPath run_penalized(const ProcessConfig& cfg, int k, const SwitchPath& switching, double xi0,
                            RngStream& overshoot_rng, RngStream& jump_rng);

/// X^P_eps with penalty exponent k >= 1. Same lanes as simulate_constrained
/// plus the Overshoot lane.
PenalizedPath simulate_penalized(const ProcessConfig& cfg, int k, const RngStream& rng);

/// Exact piecewise-linear lambda_eps for a penalised path.
TimeChange time_change(const PenalizedPath& path, double epsilon, int k);

/// The constrained and penalised processes glued through one switching
/// realisation and one post-jump uniform per jump index.
struct CoupledPair {
  CadlagPath x;
  PenalizedPath xp;
  std::vector<double> shared_jump_targets;  // post-jump values of x, in order
  MonotoneMap warp;                         // gamma: x-time -> xp-time through matched jumps
  // Per jump index i of x: the switching chain moved inside (T*_i, T*P_i).
  std::vector<bool> switched_during_gap;
  // Per matched index: xp read a different kernel than x at its jump.
  std::vector<bool> coupling_broken;

  bool any_switch_during_gap() const;
  bool any_coupling_broken() const;
};

CoupledPair simulate_coupled(const ProcessConfig& cfg, int k, const RngStream& rng);

/// Warp through matched jump times: (0,0), (a.T_i, b.T_i) for i below both
/// jump counts, (T,T). Non-increasing pairs are dropped.
MonotoneMap jump_matching_warp(const CadlagPath& a, const CadlagPath& b);

struct WarpedDistance {
  double warp_deviation;  // ||warp - Id||
  double sup_distance;    // ||a - b o warp||
  double bound() const { return warp_deviation > sup_distance ? warp_deviation : sup_distance; }
};

/// Exact sup-norms over the merged breakpoint grid (both sides of every
/// breakpoint are checked, so jumps are honoured).
WarpedDistance warped_distance(const CadlagPath& a, const CadlagPath& b, const MonotoneMap& warp);

/// Certified upper bound on the Skorokhod distance: the best of the identity
/// and the jump-matching warp, tried in both directions.
double skorokhod_upper_bound(const CadlagPath& a, const CadlagPath& b);

/// Monte Carlo mean of skorokhod_upper_bound over coupled replicas; replica r
/// uses stream id rng.stream_id() + r.
Estimate wasserstein_estimate(const ProcessConfig& cfg, int k, std::size_t replicas, const RngStream& rng,
                              unsigned threads = 1);

/// One row of the coupling report.
struct CouplingSummary {
  std::size_t n_jumps_x = 0;
  std::size_t n_jumps_xp = 0;
  bool coupling_broken = false;
  bool switched_during_gap = false;
  double sup_dist_after_warp = 0.0;
  double warp_deviation = 0.0;
  double skorokhod_bound = 0.0;
  double lambda_sup_dev = 0.0;
};

CouplingSummary summarize_coupling(const CoupledPair& pair, double epsilon, int k);

void write_coupling_header(std::ostream& out);
void write_coupling_row(std::ostream& out, std::size_t replica, int k, double epsilon, const CouplingSummary& s);

}  // namespace pdmp
