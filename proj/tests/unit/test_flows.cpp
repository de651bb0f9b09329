#include <doctest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <random>

#include "pdmp/error.hpp"
#include "pdmp/flows.hpp"

using namespace pdmp;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::ConfigInvalid;
}

// Adaptive Dormand-Prince integration of x' = a x^2 from x0 over [0, t].
double ode_oracle(double x0, double a, double t) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  State x{x0};
  if (t <= 0.0) return x0;
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, [a](const State& s, State& dx, double) { dx[0] = a * s[0] * s[0]; }, x, 0.0, t,
                             t / 100.0);
  return x[0];
}

FlowSpec log_flow(double m, double c) {
  FlowSpec f;
  f.m = m;
  f.c = c;
  f.alpha = {1.0};
  // F(x) = x - m + 1 has primitive log(x - m + 1).
  f.f = TabulatedF{"log", [m](double x) { return x - m + 1.0; }, [m](double x) { return std::log1p(x - m); },
                   [m](double z) { return m + std::expm1(z); }};
  return f;
}

}  // namespace

TEST_CASE("quadratic homeomorphism") {
  FlowSpec spec;
  spec.m = 1.0;
  spec.c = 2.0;
  spec.alpha = {1.0, 4.0};
  const auto g = build_homeomorphism(spec);
  CHECK(g.forward(1.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(g.upper == 0.5);
  CHECK(g.forward(1.0) == 0.0);
  for (int i = 1; i < 1000; ++i) {
    const double x = 1.0 + i / 1000.0;
    CHECK(std::abs(g.inverse(g.forward(x)) - x) <= 1e-12);
    const double z = 0.5 * i / 1000.0;
    CHECK(std::abs(g.forward(g.inverse(z)) - z) <= 1e-12);
    if (i > 1) CHECK(g.forward(x) > g.forward(x - 1e-3));
  }
}

TEST_CASE("constant F gives a shift") {
  FlowSpec spec;
  spec.m = -3.0;
  spec.c = 1.0;
  spec.alpha = {1.0};
  spec.f = TabulatedF{"constant", [](double) { return 1.0; }, [](double x) { return x + 3.0; },
                      [](double z) { return z - 3.0; }};
  const auto g = build_homeomorphism(spec);
  CHECK(g.forward(0.5) == 3.5);
  CHECK(g.upper == 4.0);
}

TEST_CASE("tabulated pair is checked on a grid") {
  CHECK_NOTHROW(build_homeomorphism(log_flow(0.5, 3.0)));
  auto bad = log_flow(0.5, 3.0);
  std::get<TabulatedF>(bad.f).g_inv = [](double z) { return 0.5 + std::expm1(z) * (1.0 + 1e-9); };
  CHECK(code_of([&] { build_homeomorphism(bad); }) == Errc::RoundTripFailure);
}

TEST_CASE("non-integrable and malformed specs") {
  FlowSpec spec;
  spec.m = -1.0;
  spec.c = 2.0;
  spec.alpha = {1.0};
  CHECK(code_of([&] { build_homeomorphism(spec); }) == Errc::NonIntegrableF);
  spec.m = 0.0;
  CHECK(code_of([&] { build_homeomorphism(spec); }) == Errc::NonIntegrableF);
  auto inf = log_flow(0.0, 1.0);
  std::get<TabulatedF>(inf.f).g = [](double x) { return x < 1.0 ? -std::log1p(-x) : INFINITY; };
  CHECK(code_of([&] { build_homeomorphism(inf); }) == Errc::NonIntegrableF);
  spec.m = 3.0;
  CHECK(code_of([&] { build_homeomorphism(spec); }) == Errc::ConfigInvalid);
}

TEST_CASE("quadratic preset and its reduction") {
  const auto cfg = quadratic_if_preset();
  const auto pi = invariant_measure(cfg.process.generator);
  CHECK(pi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const auto z = reduce_to_linear(cfg);
  CHECK(z.generator.speeds == std::vector<double>{1.0, 4.0});
  CHECK(z.generator.q == cfg.process.generator.q);
  CHECK(z.boundary == 0.5);
  CHECK(z.gap > 0.0);
  CHECK(z.boundary - z.gap >= z.kernels[0].upper());
  const auto ps = boundary_speed_measure(z.generator);
  CHECK(ps[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(ps[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const auto mix = averaged_jump_kernel(z.generator, z.kernels);
  const auto& parts = std::get<Mixture>(mix.variant()).components;
  CHECK(parts[0].weight == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(parts[1].weight == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_NOTHROW(validate_config(z));
}

TEST_CASE("point masses push to point masses; states are sorted by alpha") {
  auto cfg = quadratic_if_preset(1.0, 2.0, 0.25, {JumpKernel::dirac(1.5), JumpKernel::dirac(1.25)});
  cfg.flow.alpha = {4.0, 1.0};
  cfg.process.initial_state = std::size_t{0};
  const auto z = reduce_to_linear(cfg);
  CHECK(z.generator.speeds == std::vector<double>{1.0, 4.0});
  CHECK(z.generator.q(0, 0) == -2.0);
  CHECK(z.generator.q(1, 0) == 1.0);
  CHECK(std::get<Dirac>(z.kernels[0].variant()).at == 1.0 - 1.0 / 1.25);
  CHECK(std::get<Dirac>(z.kernels[1].variant()).at == 1.0 - 1.0 / 1.5);
  CHECK(std::get<std::size_t>(z.initial_state) == 1);

  cfg.flow.alpha = {2.0, 2.0};
  CHECK(code_of([&] { reduce_to_linear(cfg); }) == Errc::ConfigInvalid);
}

TEST_CASE("kernels outside (m, c - gap) are rejected") {
  auto cfg = quadratic_if_preset(1.0, 2.0, 0.25, {JumpKernel::uniform(1.0, 1.9), JumpKernel::dirac(1.2)});
  CHECK(code_of([&] { reduce_to_linear(cfg); }) == Errc::KernelSupportViolation);
  cfg = quadratic_if_preset(1.0, 2.0, 0.25, {JumpKernel::dirac(0.5), JumpKernel::dirac(1.2)});
  CHECK(code_of([&] { reduce_to_linear(cfg); }) == Errc::KernelSupportViolation);
}

TEST_CASE("closed-form quadratic flow") {
  CHECK(quadratic_hit_time(1.0, 1.0, 2.0) == 0.5);
  CHECK(quadratic_flow_value(1.0, 1.0, 0.5) == 2.0);
  for (double a : {1.0, 4.0})
    for (double x0 : {1.0, 1.3, 1.7})
      for (double frac : {0.1, 0.5, 0.9, 0.999}) {
        const double t = frac * quadratic_hit_time(x0, a, 2.0);
        CHECK(std::abs(quadratic_flow_value(x0, a, t) - ode_oracle(x0, a, t)) <= 1e-8);
      }
}

TEST_CASE("flow paths: shared hit times, boundary reached, ODE agreement") {
  const auto cfg = quadratic_if_preset();
  auto small = cfg;
  small.process.epsilon = 0.05;
  small.process.horizon = 2.0;
  for (int r = 0; r < 20; ++r) {
    const auto fp = simulate_flow(small, RngStream(21, r));
    const auto hits = fp.hits();
    REQUIRE(hits.size() == fp.z.jumps.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].time == fp.z.jumps[i].time);
      CHECK(std::abs(fp.value(hits[i].time, Side::Left) - 2.0) <= 1e-12 * 2.0);
      CHECK((hits[i].prejump_speed == 1.0 || hits[i].prejump_speed == 2.0));
      CHECK(hits[i].postjump_value >= 1.0);
      CHECK(hits[i].postjump_value <= 1.75 + 1e-12);
    }
    for (const auto& s : fp.z.segments) {
      const double x0 = fp.g.inverse(s.x_start);
      CHECK(std::abs(fp.g.forward(x0) - s.x_start) <= 1e-12 * std::max(1.0, std::abs(s.x_start)));
      for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        const double t = s.t_start + frac * (s.t_end - s.t_start);
        const double closed = fp.value(t, Side::Left);
        CHECK(std::abs(closed - ode_oracle(x0, s.slope, t - s.t_start)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("random tabulated pairs round-trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double m = u(rng);
    const double c = m + 0.5 + std::abs(u(rng));
    CHECK_NOTHROW(build_homeomorphism(log_flow(m, c)));
  }
}
