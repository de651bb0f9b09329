#include "pdmp/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"

namespace pdmp {

namespace {

void open_segment(CadlagPath& p, double t, double x, double slope) {
  p.segments.push_back(Segment{t, x, slope, t, x});
}

void close_segment(CadlagPath& p, double t, double x) {
  p.segments.back().t_end = t;
  p.segments.back().x_end = x;
}

double eval_segment(const Segment& s, double t) {
  if (t >= s.t_end) return s.x_end;
  if (t <= s.t_start) return s.x_start;
  const double v = s.x_start + s.slope * (t - s.t_start);
  return s.slope >= 0.0 ? std::min(v, s.x_end) : std::max(v, s.x_end);
}

double below(double c) { return std::nextafter(c, -std::numeric_limits<double>::infinity()); }

}  // namespace

void validate_config(const ProcessConfig& cfg) {
  try {
    validate_generator(cfg.generator);
    cfg.initial.validate();
    for (const auto& k : cfg.kernels) k.validate();
  } catch (const Error& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  const double c = cfg.boundary;
  if (!std::isfinite(c)) throw Error(Errc::ConfigInvalid, "boundary must be finite");
  if (!(cfg.gap > 0.0)) throw Error(Errc::ConfigInvalid, "gap must be positive");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw Error(Errc::ConfigInvalid, "horizon must be positive");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw Error(Errc::ConfigInvalid, "epsilon must lie in (0,1]");
  if (cfg.kernels.size() != cfg.generator.size())
    throw Error(Errc::ConfigInvalid, "expected one kernel per speed, got " + std::to_string(cfg.kernels.size()));
  for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
    if (!(cfg.kernels[i].upper() <= c - cfg.gap))
      throw Error(Errc::ConfigInvalid, "kernel " + std::to_string(i) + " reaches above boundary - gap");
  }
  if (!(cfg.initial.upper() < c)) throw Error(Errc::ConfigInvalid, "initial law must sit below the boundary");
  if (const auto* idx = std::get_if<std::size_t>(&cfg.initial_state); idx && *idx >= cfg.generator.size())
    throw Error(Errc::ConfigInvalid, "initial speed index out of range");
  if (const auto* law = std::get_if<ProbabilityVector>(&cfg.initial_state); law && law->size() != cfg.generator.size())
    throw Error(Errc::ConfigInvalid, "initial speed law has the wrong size");
}

double hit_count_bound(const ProcessConfig& cfg) {
  const double steady = cfg.horizon * cfg.generator.max_speed() / cfg.gap;
  return cfg.initial.upper() <= cfg.boundary - cfg.gap ? steady : steady + 1.0;
}

std::size_t CadlagPath::jump_count(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(jumps.begin(), jumps.end(), t, [](double v, const HittingRecord& r) { return v < r.time; }) -
      jumps.begin());
}

double path_value(const CadlagPath& path, double t, Side side) {
  if (!(t >= 0.0 && t <= path.horizon)) throw Error(Errc::OutOfHorizon, "t outside [0, horizon]");
  const auto& segs = path.segments;
  if (segs.empty()) throw Error(Errc::OutOfHorizon, "empty path");
  if (side == Side::Right) {
    auto it = std::upper_bound(segs.begin(), segs.end(), t, [](double v, const Segment& s) { return v < s.t_start; });
    return eval_segment(*std::prev(it), t);
  }
  auto it = std::lower_bound(segs.begin(), segs.end(), t, [](const Segment& s, double v) { return s.t_start < v; });
  if (it == segs.begin()) return segs.front().x_start;
  return eval_segment(*std::prev(it), t);
}

CadlagPath run_constrained(const ProcessConfig& cfg, const SwitchPath& switching, double xi0, RngStream& jump_rng) {
  const auto& speeds = cfg.generator.speeds;
  const double c = cfg.boundary;
  const double horizon = cfg.horizon;
  if (switching.horizon < horizon) throw Error(Errc::ConfigInvalid, "switching path shorter than the horizon");
  if (!(xi0 < c)) throw Error(Errc::ConfigInvalid, "start point must lie below the boundary");

  CadlagPath path;
  path.horizon = horizon;
  path.boundary = c;
  path.kind = PathKind::Constrained;

  const auto& events = switching.events;
  std::size_t e = 0;
  std::size_t state = switching.initial_state;
  double t = 0.0;
  double x = xi0;
  open_segment(path, t, x, speeds[state]);

  for (;;) {
    const double y = speeds[state];
    const bool has_switch = e < events.size() && events[e].time <= horizon;
    const double next_stop = has_switch ? events[e].time : horizon;
    double hit = t + (c - x) / y;
    if (!std::isfinite(hit)) throw Error(Errc::NonfiniteTime, "hit time is not finite");

    // A hit tied with a switch wins, so the kernel reads the pre-switch speed.
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
      const double xi = cfg.kernels[state].sample(jump_rng.uniform());
      path.jumps.push_back(HittingRecord{path.jumps.size() + 1, hit, y, xi});
      t = hit;
      x = xi;
      open_segment(path, t, x, y);
      continue;
    }
    close_segment(path, next_stop, x_next);
    t = next_stop;
    x = x_next;
    if (!has_switch) break;
    state = events[e++].state;
    open_segment(path, t, x, speeds[state]);
  }
  return path;
}

CadlagPath simulate_constrained(const ProcessConfig& cfg, const RngStream& rng) {
  validate_config(cfg);
  auto init_rng = rng.substream(Lane::Initial);
  auto jump_rng = rng.substream(Lane::JumpTarget);
  const double xi0 = cfg.initial.sample(init_rng.uniform());
  const auto switching =
      simulate_switching(cfg.generator, cfg.initial_state, cfg.epsilon, cfg.horizon, rng.substream(Lane::Switching));
  return run_constrained(cfg, switching, xi0, jump_rng);
}

CadlagPath simulate_averaged(const ProcessConfig& cfg, const RngStream& rng) {
  validate_config(cfg);
  const double drift = averaged_drift(cfg.generator);
  const JumpKernel nu_bar = averaged_jump_kernel(cfg.generator, cfg.kernels);
  const auto& parts = std::get<Mixture>(nu_bar.variant()).components;
  const double c = cfg.boundary;

  auto init_rng = rng.substream(Lane::Initial);
  auto jump_rng = rng.substream(Lane::JumpTarget);

  CadlagPath path;
  path.horizon = cfg.horizon;
  path.boundary = c;
  path.kind = PathKind::Averaged;

  double t = 0.0;
  double x = cfg.initial.sample(init_rng.uniform());
  open_segment(path, t, x, drift);
  for (;;) {
    const double hit = next_averaged_hit(t, drift, c, x);
    if (hit > cfg.horizon) {
      close_segment(path, cfg.horizon, std::min(x + drift * (cfg.horizon - t), below(c)));
      break;
    }
    close_segment(path, hit, c);
    const auto [j, v] = nu_bar.select_component(jump_rng.uniform());
    const double xi = parts[j].kernel.sample(v);
    path.jumps.push_back(HittingRecord{path.jumps.size() + 1, hit, cfg.generator.speeds[j], xi});
    t = hit;
    x = xi;
    open_segment(path, t, x, drift);
  }
  return path;
}

CadlagPath mirror_readout(const SwitchingGenerator& g, const SwitchPath& switching) {
  CadlagPath m;
  m.kind = PathKind::Mirror;
  m.boundary = std::numeric_limits<double>::infinity();

  double s = 0.0;  // space travelled
  double t = 0.0;
  std::size_t state = switching.initial_state;
  auto advance = [&](double t_next) {
    const double y = g.speeds[state];
    const double s_next = s + y * (t_next - t);
    m.segments.push_back(Segment{s, t, 1.0 / y, s_next, t_next});
    s = s_next;
    t = t_next;
  };
  for (const auto& e : switching.events) {
    advance(e.time);
    state = e.state;
  }
  advance(switching.horizon);
  m.horizon = s;
  return m;
}

CadlagPath simulate_mirror(const ProcessConfig& cfg, const RngStream& rng, double x_horizon) {
  validate_config(cfg);
  if (!(x_horizon > 0.0)) throw Error(Errc::ConfigInvalid, "mirror horizon must be positive");
  const auto tilted = tilted_generator(cfg.generator);
  // W starts from the reciprocal of Y(0), so a stationary Y start means pi, not pi*.
  InitialState init = cfg.initial_state;
  if (std::holds_alternative<Stationary>(init)) init = invariant_measure(cfg.generator);
  const auto w = simulate_switching(tilted, init, cfg.epsilon, x_horizon, rng.substream(Lane::Switching));

  CadlagPath m;
  m.kind = PathKind::Mirror;
  m.horizon = x_horizon;
  m.boundary = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double value = 0.0;
  std::size_t state = w.initial_state;
  auto advance = [&](double x_next) {
    const double slope = tilted.speeds[state];
    const double v_next = value + slope * (x_next - x);
    m.segments.push_back(Segment{x, value, slope, x_next, v_next});
    x = x_next;
    value = v_next;
  };
  for (const auto& e : w.events) {
    advance(e.time);
    state = e.state;
  }
  advance(x_horizon);
  return m;
}

void write_path_csv(std::ostream& out, const CadlagPath& path) {
  write_path_csv(out, path, [](double x) { return x; });
}

void write_path_csv(std::ostream& out, const CadlagPath& path, const std::function<double(double)>& map) {
  out << "t,x,kind\n";
  std::size_t jp = 0;
  for (std::size_t k = 0; k < path.segments.size(); ++k) {
    const auto& s = path.segments[k];
    if (k > 0 && jp < path.jumps.size() && s.t_start == path.jumps[jp].time) {
      out << format_real(s.t_start) << ',' << format_real(map(path.segments[k - 1].x_end)) << ",hit\n";
      out << format_real(s.t_start) << ',' << format_real(map(s.x_start)) << ",jump_target\n";
      ++jp;
    } else {
      out << format_real(s.t_start) << ',' << format_real(map(s.x_start)) << ",segment_start\n";
    }
  }
  out << format_real(path.horizon) << ',' << format_real(map(path_value(path, path.horizon))) << ",horizon\n";
}

void write_hits_header(std::ostream& out) { out << "replica,i,t_star,prejump_speed,postjump_value\n"; }

void write_hits_rows(std::ostream& out, std::size_t replica, const std::vector<HittingRecord>& hits) {
  for (const auto& h : hits) {
    out << replica << ',' << h.index << ',' << format_real(h.time) << ',' << format_real(h.prejump_speed) << ','
        << format_real(h.postjump_value) << '\n';
  }
}

}  // namespace pdmp
