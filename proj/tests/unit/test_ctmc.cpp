#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "pdmp/ctmc.hpp"
#include "pdmp/error.hpp"
#include "pdmp/validation.hpp"

using namespace pdmp;

namespace {

// Holding times of the first sojourn in state 0, started from state 0.
std::vector<double> first_holding_times(double eps, int n) {
  const auto g = fixtures::quadratic_z_generator();
  std::vector<double> out;
  for (int r = 0; r < n; ++r) {
    const auto p = simulate_switching(g, std::size_t{0}, eps, 60.0 * eps, RngStream(11, r));
    REQUIRE(!p.events.empty());
    out.push_back(p.events.front().time);
  }
  return out;
}

}  // namespace

TEST_CASE("holding times are exponential with rate -q_ii / eps") {
  for (double eps : {1.0, 0.01}) {
    const auto h = first_holding_times(eps, 100000);
    const double rate = 1.0 / eps;  // -q_00 = 1
    double s = 0.0;
    for (double v : h) s += v;
    const double mean = s / h.size();
    CHECK(std::abs(mean - 1.0 / rate) < 4.0 / rate / std::sqrt(h.size()));
    const double d = ks_statistic(
        h, [rate](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); },
        [rate](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); });
    CHECK(d < ks_critical_001(h.size()));
  }
}

TEST_CASE("switch times scale linearly with eps under a shared stream") {
  const auto g = fixtures::quadratic_z_generator();
  const auto slow = simulate_switching(g, Stationary{}, 1.0, 50.0, RngStream(5, 1));
  const auto fast = simulate_switching(g, Stationary{}, 0.01, 0.5, RngStream(5, 1));
  REQUIRE(slow.events.size() == fast.events.size());
  CHECK(slow.initial_state == fast.initial_state);
  for (std::size_t i = 0; i < slow.events.size(); ++i) {
    CHECK(slow.events[i].state == fast.events[i].state);
    CHECK(std::abs(fast.events[i].time - 0.01 * slow.events[i].time) <= 1e-12 * slow.events[i].time);
  }
}

TEST_CASE("state_at is cadlag") {
  SwitchPath p;
  p.initial_state = 0;
  p.horizon = 3.0;
  p.events = {{1.0, 1}, {2.0, 0}};
  CHECK(state_at(p, 0.0) == 0);
  CHECK(state_at(p, 1.0) == 1);
  CHECK(state_at(p, 1.0, Side::Left) == 0);
  CHECK(state_at(p, 2.0, Side::Left) == 1);
  CHECK(state_at(p, 3.0) == 0);
  CHECK_THROWS_AS(state_at(p, 3.5), Error);
  const auto occ = occupation_measure(p, 2, 3.0);
  CHECK(occ[0] == doctest::Approx(2.0 / 3.0));
  CHECK(occ[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("initial state specs") {
  const auto g = fixtures::quadratic_z_generator();
  CHECK(simulate_switching(g, std::size_t{1}, 1.0, 1.0, RngStream(1, 0)).initial_state == 1);
  CHECK_THROWS_AS(simulate_switching(g, std::size_t{2}, 1.0, 1.0, RngStream(1, 0)), Error);
  int ones = 0;
  const ProbabilityVector law{{1.0, 4.0}, {0.1, 0.9}};
  for (int r = 0; r < 5000; ++r) ones += simulate_switching(g, law, 1.0, 1e-3, RngStream(2, r)).initial_state == 1;
  CHECK(std::abs(ones / 5000.0 - 0.9) < 4.0 * std::sqrt(0.09 / 5000));
}

TEST_CASE("absorbing state is rejected") {
  SwitchingGenerator g;
  g.speeds = {1.0, 2.0};
  g.q = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(simulate_switching(g, Stationary{}, 1.0, 1.0, RngStream(0, 0)), Error);
}

TEST_CASE("occupation approaches pi as eps shrinks") {
  const auto g = fixtures::quadratic_z_generator();
  std::vector<double> tvs, ses;
  for (double eps : {1.0, 0.1, 0.01, 0.001}) {
    std::vector<SwitchPath> paths;
    for (int r = 0; r < 400; ++r) paths.push_back(simulate_switching(g, Stationary{}, eps, 1.0, RngStream(4, r)));
    const auto est = occupation_vs_pi(paths, g, 1.0);
    tvs.push_back(est.mean);
    ses.push_back(est.std_error);
  }
  for (std::size_t i = 1; i < tvs.size(); ++i) CHECK(tvs[i] <= tvs[i - 1] + 2.0 * (ses[i] + ses[i - 1]));
  CHECK(tvs.back() < 0.02);
}

TEST_CASE("switch CSV") {
  SwitchPath p;
  p.initial_state = 1;
  p.horizon = 2.0;
  p.events = {{0.5, 0}};
  std::ostringstream out;
  write_switch_csv(out, p);
  CHECK(out.str() == "t,new_state\n0,1\n0.5,0\n");
}
