#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "pdmp/error.hpp"
#include "pdmp/penalty.hpp"
#include "pdmp/validation.hpp"

using namespace pdmp;

namespace {

std::string csv(const CadlagPath& p) {
  std::ostringstream out;
  write_path_csv(out, p);
  return out.str();
}

ProcessConfig mixed_config(double eps, double horizon) {
  auto cfg = fixtures::quadratic_z_config(eps, horizon);
  cfg.kernels = {JumpKernel::uniform(-0.5, 0.0), JumpKernel::dirac(-0.25)};
  return cfg;
}

}  // namespace

TEST_CASE("coupled components equal the standalone simulations bit for bit") {
  for (int r = 0; r < 50; ++r) {
    const auto cfg = mixed_config(0.3, 3.0);
    const RngStream rng(12, r);
    const auto pair = simulate_coupled(cfg, 2, rng);
    CHECK(csv(pair.x) == csv(simulate_constrained(cfg, rng)));
    CHECK(csv(pair.xp.path) == csv(simulate_penalized(cfg, 2, rng).path));
    REQUIRE(pair.shared_jump_targets.size() == pair.x.jumps.size());
  }
}

TEST_CASE("penalised path sits at or above c exactly during overshoots") {
  const auto cfg = mixed_config(0.5, 4.0);
  for (int r = 0; r < 50; ++r) {
    const auto pp = simulate_penalized(cfg, 1, RngStream(3, r));
    auto inside = [&](double t) {
      for (const auto& o : pp.overshoots)
        if (t > o.hit_time && t < o.jump_time) return true;
      return false;
    };
    for (int k = 0; k < 400; ++k) {
      const double t = cfg.horizon * k / 400.0;
      const double x = path_value(pp.path, t);
      if (inside(t)) {
        CHECK(x >= cfg.boundary);
      } else {
        CHECK(x <= cfg.boundary);
      }
    }
    for (const auto& o : pp.overshoots) {
      CHECK(o.duration > 0.0);
      CHECK(o.jump_time == o.hit_time + o.duration);
      if (o.completed) CHECK(o.jump_time <= cfg.horizon);
    }
  }
}

TEST_CASE("overshoot durations are exponential with mean eps^k") {
  const auto cfg = mixed_config(0.5, 6.0);
  for (int k : {1, 3}) {
    std::vector<double> d;
    for (int r = 0; r < 3000; ++r)
      for (const auto& o : simulate_penalized(cfg, k, RngStream(4, r)).overshoots) d.push_back(o.duration);
    const double rate = std::pow(0.5, -k);
    const double ks = ks_statistic(
        d, [rate](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); },
        [rate](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); });
    CHECK(ks < ks_critical_001(d.size()));
  }
}

TEST_CASE("first overshoot scales by eps per unit of k under shared streams") {
  const auto cfg = mixed_config(0.5, 3.0);
  for (int r = 0; r < 30; ++r) {
    const auto a = simulate_penalized(cfg, 1, RngStream(5, r));
    const auto b = simulate_penalized(cfg, 2, RngStream(5, r));
    if (a.overshoots.empty()) continue;
    REQUIRE(!b.overshoots.empty());
    CHECK(a.overshoots[0].hit_time == b.overshoots[0].hit_time);
    CHECK(b.overshoots[0].duration == doctest::Approx(0.5 * a.overshoots[0].duration).epsilon(1e-13));
  }
}

TEST_CASE("property: time change is an increasing contraction with the right deficit") {
  for (double eps : {0.2, 0.5, 0.9}) {
    for (int k : {1, 2, 4}) {
      const auto cfg = mixed_config(eps, 3.0);
      for (int r = 0; r < 30; ++r) {
        const auto pp = simulate_penalized(cfg, k, RngStream(6, r));
        const auto lambda = time_change(pp, eps, k);
        CHECK(lambda.x.front() == 0.0);
        CHECK(lambda.y.front() == 0.0);
        CHECK(lambda.x.back() == cfg.horizon);
        CHECK(lambda.strictly_increasing());
        double previous_mu = 0.0;
        for (int i = 0; i <= 300; ++i) {
          const double t = std::min(cfg.horizon, cfg.horizon * i / 300.0);
          CHECK(lambda(t) <= t + 1e-15);
          const double mu = time_change_complement(lambda, t);
          CHECK(mu >= previous_mu - 1e-15);
          previous_mu = mu;
        }
        double inside = 0.0;
        for (const auto& o : pp.overshoots) inside += std::min(o.jump_time, cfg.horizon) - o.hit_time;
        // Slope 1/(1+eps^-k) during overshoots leaves a deficit of 1/(1+eps^k) per unit time there.
        const double expected = inside / (1.0 + std::pow(eps, k));
        CHECK(lambda.sup_deviation() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(lambda.inverse(lambda(1.234)) == doctest::Approx(1.234).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("monotone maps") {
  const auto id = MonotoneMap::identity(2.0);
  CHECK(id(0.7) == 0.7);
  CHECK(id.sup_deviation() == 0.0);
  const MonotoneMap m{{0.0, 1.0, 2.0}, {0.0, 1.5, 2.0}};
  CHECK(m(1.0) == 1.5);
  CHECK(m(0.5) == 0.75);
  CHECK(m.inverse(1.75) == 1.5);
  CHECK(m.sup_deviation() == 0.5);
  CHECK(m.strictly_increasing());
  CHECK_FALSE((MonotoneMap{{0.0, 1.0, 1.0}, {0.0, 1.0, 2.0}}).strictly_increasing());
}

TEST_CASE("property: warped distances") {
  for (int r = 0; r < 40; ++r) {
    const auto cfg = mixed_config(0.4, 3.0);
    const auto pair = simulate_coupled(cfg, 2, RngStream(7, r));
    const auto& a = pair.x;
    const auto& b = pair.xp.path;
    CHECK(skorokhod_upper_bound(a, a) == 0.0);
    CHECK(skorokhod_upper_bound(a, b) == skorokhod_upper_bound(b, a));
    CHECK(pair.warp.strictly_increasing());

    // The merged-grid sup is exact, so no sampled grid can exceed it.
    const auto id = warped_distance(a, b, MonotoneMap::identity(cfg.horizon));
    const auto wd = warped_distance(a, b, pair.warp);
    double brute_id = 0.0, brute_w = 0.0;
    for (int i = 0; i <= 3000; ++i) {
      const double t = std::min(cfg.horizon, cfg.horizon * i / 3000.0);
      brute_id = std::max(brute_id, std::abs(path_value(a, t) - path_value(b, t)));
      brute_w = std::max(brute_w, std::abs(path_value(a, t) - path_value(b, pair.warp(t))));
    }
    CHECK(brute_id <= id.sup_distance + 1e-12);
    CHECK(brute_w <= wd.sup_distance + 1e-12);
    CHECK(id.warp_deviation == 0.0);
    CHECK(skorokhod_upper_bound(a, b) <= std::max(id.sup_distance, 0.0) + 1e-15);
  }
}

TEST_CASE("horizon mismatch") {
  const auto a = simulate_constrained(mixed_config(0.5, 1.0), RngStream(0, 0));
  const auto b = simulate_constrained(mixed_config(0.5, 2.0), RngStream(0, 0));
  CHECK_THROWS_AS(skorokhod_upper_bound(a, b), Error);
  CHECK_THROWS_AS(warped_distance(a, b, MonotoneMap::identity(1.0)), Error);
}

TEST_CASE("no exceptional events with a single speed") {
  ProcessConfig cfg;
  cfg.generator = fixtures::single_speed(1.0);
  cfg.kernels = {JumpKernel::uniform(-1.0, 0.0)};
  cfg.horizon = 5.0;
  cfg.epsilon = 0.5;
  for (int r = 0; r < 20; ++r) {
    const auto pair = simulate_coupled(cfg, 1, RngStream(9, r));
    CHECK_FALSE(pair.any_switch_during_gap());
    CHECK_FALSE(pair.any_coupling_broken());
    // Matched jumps share their targets.
    const std::size_t n = std::min(pair.x.jumps.size(), pair.xp.path.jumps.size());
    for (std::size_t i = 0; i < n; ++i) CHECK(pair.x.jumps[i].postjump_value == pair.xp.path.jumps[i].postjump_value);
  }
}

TEST_CASE("coupling report row") {
  const auto cfg = mixed_config(0.5, 2.0);
  const auto pair = simulate_coupled(cfg, 3, RngStream(1, 0));
  const auto s = summarize_coupling(pair, 0.5, 3);
  CHECK(s.n_jumps_x == pair.x.jumps.size());
  std::ostringstream out;
  write_coupling_header(out);
  write_coupling_row(out, 0, 3, 0.5, s);
  CHECK(out.str().rfind("replica,k,epsilon,n_jumps_x,n_jumps_xp,coupling_broken,sup_dist_after_warp,lambda_sup_dev\n0,3,0.5,", 0) == 0);
}

TEST_CASE("wasserstein estimate is thread-count independent") {
  const auto cfg = mixed_config(0.5, 2.0);
  const auto one = wasserstein_estimate(cfg, 2, 64, RngStream(3, 0), 1);
  const auto four = wasserstein_estimate(cfg, 2, 64, RngStream(3, 0), 4);
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK(one.n == 64);
}
