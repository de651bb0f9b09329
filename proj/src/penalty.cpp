#include "pdmp/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"
#include "pdmp/parallel.hpp"

namespace pdmp {

namespace {

void open_segment(CadlagPath& p, double t, double x, double slope) {
  p.segments.push_back(Segment{t, x, slope, t, x});
}

void close_segment(CadlagPath& p, double t, double x) {
  p.segments.back().t_end = t;
  p.segments.back().x_end = x;
}

double interpolate(const std::vector<double>& from, const std::vector<double>& to, double v) {
  auto it = std::upper_bound(from.begin(), from.end(), v);
  if (it == from.begin()) return to.front();
  const auto i = static_cast<std::size_t>(std::prev(it) - from.begin());
  if (from[i] == v || i + 1 == from.size()) return to[i];
  // Slope form keeps unit-slope pieces exact.
  const double slope = (to[i + 1] - to[i]) / (from[i + 1] - from[i]);
  return std::clamp(to[i] + (v - from[i]) * slope, to[i], to[i + 1]);
}

// Grid point for the sup-norm: `t` on a's axis, `w` = warp(t) on b's axis.
struct GridPoint {
  double t;
  double w;
};

}  // namespace

MonotoneMap MonotoneMap::identity(double horizon) { return MonotoneMap{{0.0, horizon}, {0.0, horizon}}; }

double MonotoneMap::operator()(double t) const { return interpolate(x, y, t); }

double MonotoneMap::inverse(double v) const { return interpolate(y, x, v); }

double MonotoneMap::sup_deviation() const {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(y[i] - x[i]));
  return d;
}

bool MonotoneMap::strictly_increasing() const {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1] && y[i] > y[i - 1])) return false;
  return true;
}

PenalizedPath run_penalized(const ProcessConfig& cfg, int k, const SwitchPath& switching, double xi0,
                            RngStream& overshoot_rng, RngStream& jump_rng) {
  if (k < 1) throw Error(Errc::ConfigInvalid, "penalty exponent k must be >= 1");
  const auto& speeds = cfg.generator.speeds;
  const double c = cfg.boundary;
  const double horizon = cfg.horizon;
  const double rate = std::pow(cfg.epsilon, -k);
  if (switching.horizon < horizon) throw Error(Errc::ConfigInvalid, "switching path shorter than the horizon");

  PenalizedPath out;
  CadlagPath& path = out.path;
  path.horizon = horizon;
  path.boundary = c;
  path.kind = PathKind::Penalized;

  const auto& events = switching.events;
  std::size_t e = 0;
  std::size_t state = switching.initial_state;
  double t = 0.0;
  double x = xi0;
  bool above = false;
  double hit_time = 0.0;
  double jump_time = 0.0;
  open_segment(path, t, x, speeds[state]);

  for (;;) {
    const double y = speeds[state];
    const bool has_switch = e < events.size() && events[e].time <= horizon;
    const double next_stop = has_switch ? events[e].time : horizon;

    if (!above) {
      double hit = t + (c - x) / y;
      if (!std::isfinite(hit)) throw Error(Errc::NonfiniteTime, "hit time is not finite");
      bool hits = hit <= next_stop;
      double x_next = 0.0;
      if (!hits) {
        x_next = x + y * (next_stop - t);
        if (x_next >= c) {
          hits = true;
          hit = next_stop;
        }
      }
      if (hits) {
        close_segment(path, hit, c);
        above = true;
        hit_time = hit;
        jump_time = hit + overshoot_rng.exponential(rate);
        t = hit;
        x = c;
        open_segment(path, t, x, y);
        continue;
      }
      close_segment(path, next_stop, x_next);
      t = next_stop;
      x = x_next;
    } else {
      // The clock ringing at a switch instant reads the pre-switch speed.
      if (jump_time <= next_stop) {
        close_segment(path, jump_time, x + y * (jump_time - t));
        const double xi = cfg.kernels[state].sample(jump_rng.uniform());
        out.overshoots.push_back(Overshoot{hit_time, jump_time - hit_time, jump_time, xi, y, true});
        path.jumps.push_back(HittingRecord{path.jumps.size() + 1, jump_time, y, xi});
        above = false;
        t = jump_time;
        x = xi;
        open_segment(path, t, x, y);
        continue;
      }
      const double x_next = x + y * (next_stop - t);
      close_segment(path, next_stop, x_next);
      t = next_stop;
      x = x_next;
      if (!has_switch) {
        out.overshoots.push_back(Overshoot{hit_time, jump_time - hit_time, jump_time,
                                           std::numeric_limits<double>::quiet_NaN(), y, false});
      }
    }
    if (!has_switch) break;
    state = events[e++].state;
    open_segment(path, t, x, speeds[state]);
  }
  return out;
}

PenalizedPath simulate_penalized(const ProcessConfig& cfg, int k, const RngStream& rng) {
  validate_config(cfg);
  auto init_rng = rng.substream(Lane::Initial);
  auto jump_rng = rng.substream(Lane::JumpTarget);
  auto overshoot_rng = rng.substream(Lane::Overshoot);
  const double xi0 = cfg.initial.sample(init_rng.uniform());
  const auto switching =
      simulate_switching(cfg.generator, cfg.initial_state, cfg.epsilon, cfg.horizon, rng.substream(Lane::Switching));
  return run_penalized(cfg, k, switching, xi0, overshoot_rng, jump_rng);
}

TimeChange time_change(const PenalizedPath& p, double epsilon, int k) {
  const double horizon = p.path.horizon;
  const double slow = 1.0 / (1.0 + std::pow(epsilon, -k));
  TimeChange lambda{{0.0}, {0.0}};
  auto push = [&](double t, double v) {
    if (t > lambda.x.back()) {
      lambda.x.push_back(t);
      lambda.y.push_back(v);
    }
  };
  double t = 0.0;
  double value = 0.0;
  for (const auto& o : p.overshoots) {
    if (o.hit_time >= horizon) break;
    value += o.hit_time - t;
    push(o.hit_time, value);
    const double end = std::min(o.jump_time, horizon);
    value += (end - o.hit_time) * slow;
    push(end, value);
    t = end;
  }
  if (t < horizon) {
    value += horizon - t;
    push(horizon, value);
  }
  return lambda;
}

bool CoupledPair::any_switch_during_gap() const {
  return std::find(switched_during_gap.begin(), switched_during_gap.end(), true) != switched_during_gap.end();
}

bool CoupledPair::any_coupling_broken() const {
  return std::find(coupling_broken.begin(), coupling_broken.end(), true) != coupling_broken.end();
}

MonotoneMap jump_matching_warp(const CadlagPath& a, const CadlagPath& b) {
  const double horizon = a.horizon;
  MonotoneMap w{{0.0}, {0.0}};
  const std::size_t n = std::min(a.jumps.size(), b.jumps.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double ta = a.jumps[i].time;
    const double tb = b.jumps[i].time;
    if (ta > w.x.back() && tb > w.y.back() && ta < horizon && tb < horizon) {
      w.x.push_back(ta);
      w.y.push_back(tb);
    }
  }
  w.x.push_back(horizon);
  w.y.push_back(horizon);
  return w;
}

CoupledPair simulate_coupled(const ProcessConfig& cfg, int k, const RngStream& rng) {
  validate_config(cfg);
  auto init_rng = rng.substream(Lane::Initial);
  auto overshoot_rng = rng.substream(Lane::Overshoot);
  // Both components read the same uniform for their i-th jump.
  auto jump_rng_x = rng.substream(Lane::JumpTarget);
  auto jump_rng_xp = rng.substream(Lane::JumpTarget);
  const double xi0 = cfg.initial.sample(init_rng.uniform());
  const auto switching =
      simulate_switching(cfg.generator, cfg.initial_state, cfg.epsilon, cfg.horizon, rng.substream(Lane::Switching));

  CoupledPair pair;
  pair.x = run_constrained(cfg, switching, xi0, jump_rng_x);
  pair.xp = run_penalized(cfg, k, switching, xi0, overshoot_rng, jump_rng_xp);
  pair.warp = jump_matching_warp(pair.x, pair.xp.path);

  const auto& jx = pair.x.jumps;
  const auto& jp = pair.xp.path.jumps;
  for (const auto& h : jx) pair.shared_jump_targets.push_back(h.postjump_value);
  for (std::size_t i = 0; i < jx.size(); ++i) {
    const double lo = jx[i].time;
    const double hi = i < jp.size() ? jp[i].time : cfg.horizon;
    auto it = std::upper_bound(switching.events.begin(), switching.events.end(), lo,
                               [](double v, const SwitchEvent& s) { return v < s.time; });
    pair.switched_during_gap.push_back(it != switching.events.end() && it->time < hi);
  }
  for (std::size_t i = 0; i < std::min(jx.size(), jp.size()); ++i)
    pair.coupling_broken.push_back(jx[i].prejump_speed != jp[i].prejump_speed);
  return pair;
}

WarpedDistance warped_distance(const CadlagPath& a, const CadlagPath& b, const MonotoneMap& warp) {
  if (a.horizon != b.horizon) throw Error(Errc::HorizonMismatch, "paths have different horizons");
  const double horizon = a.horizon;

  std::vector<GridPoint> grid;
  grid.reserve(a.segments.size() + b.segments.size() + warp.x.size() + 1);
  for (const auto& s : a.segments) grid.push_back({s.t_start, warp(s.t_start)});
  for (std::size_t i = 0; i < warp.x.size(); ++i) grid.push_back({warp.x[i], warp.y[i]});
  for (const auto& s : b.segments) grid.push_back({warp.inverse(s.t_start), s.t_start});
  grid.push_back({horizon, horizon});
  std::sort(grid.begin(), grid.end(), [](const GridPoint& l, const GridPoint& r) {
    return l.t < r.t || (l.t == r.t && l.w < r.w);
  });

  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& g = grid[i];
    sup = std::max(sup, std::abs(path_value(a, g.t, Side::Right) - path_value(b, g.w, Side::Right)));
    if (g.t > 0.0) sup = std::max(sup, std::abs(path_value(a, g.t, Side::Left) - path_value(b, g.w, Side::Left)));
  }
  return WarpedDistance{warp.sup_deviation(), sup};
}

namespace {

double one_sided_bound(const CadlagPath& a, const CadlagPath& b) {
  const double identity = warped_distance(a, b, MonotoneMap::identity(a.horizon)).bound();
  const double matched = warped_distance(a, b, jump_matching_warp(a, b)).bound();
  return std::min(identity, matched);
}

}  // namespace

double skorokhod_upper_bound(const CadlagPath& a, const CadlagPath& b) {
  if (a.horizon != b.horizon) throw Error(Errc::HorizonMismatch, "paths have different horizons");
  return std::min(one_sided_bound(a, b), one_sided_bound(b, a));
}

Estimate wasserstein_estimate(const ProcessConfig& cfg, int k, std::size_t replicas, const RngStream& rng,
                              unsigned threads) {
  if (replicas < 2) throw Error(Errc::ConfigInvalid, "need at least two replicas");
  const auto bounds = parallel_map(replicas, threads, [&](std::size_t r) {
    const auto pair = simulate_coupled(cfg, k, RngStream(rng.seed(), rng.stream_id() + r));
    return skorokhod_upper_bound(pair.x, pair.xp.path);
  });
  return mean_and_error(bounds);
}

CouplingSummary summarize_coupling(const CoupledPair& pair, double epsilon, int k) {
  CouplingSummary s;
  s.n_jumps_x = pair.x.jumps.size();
  s.n_jumps_xp = pair.xp.path.jumps.size();
  s.coupling_broken = pair.any_coupling_broken();
  s.switched_during_gap = pair.any_switch_during_gap();
  const auto wd = warped_distance(pair.x, pair.xp.path, pair.warp);
  s.sup_dist_after_warp = wd.sup_distance;
  s.warp_deviation = wd.warp_deviation;
  s.skorokhod_bound = skorokhod_upper_bound(pair.x, pair.xp.path);
  s.lambda_sup_dev = time_change(pair.xp, epsilon, k).sup_deviation();
  return s;
}

void write_coupling_header(std::ostream& out) {
  out << "replica,k,epsilon,n_jumps_x,n_jumps_xp,coupling_broken,sup_dist_after_warp,lambda_sup_dev\n";
}

void write_coupling_row(std::ostream& out, std::size_t replica, int k, double epsilon, const CouplingSummary& s) {
  out << replica << ',' << k << ',' << format_real(epsilon) << ',' << s.n_jumps_x << ',' << s.n_jumps_xp << ','
      << (s.coupling_broken ? 1 : 0) << ',' << format_real(s.sup_dist_after_warp) << ','
      << format_real(s.lambda_sup_dev) << '\n';
}

}  // namespace pdmp
