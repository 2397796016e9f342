#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "mpctune/env.hpp"

using mpctune::env::Plant;
using mpctune::env::State;

namespace {

// Reference right-hand sides written directly from the equations of motion,
// kept independent of the library implementation.

State ref_pendulum(const Plant& p, const State& s, double u) {
  State d(2);
  d[0] = s[1];
  d[1] = 1.5 * p.gravity / p.length * std::sin(s[0]) +
         3.0 * u / (p.mass * p.length * p.length);
  return d;
}

State ref_cartpole(const Plant& p, const State& s, double u) {
  const double st = std::sin(s[2]), ct = std::cos(s[2]);
  const double mt = p.cart_mass + p.pole_mass;
  const double tmp =
      (u + p.pole_mass * p.pole_half_length * s[3] * s[3] * st) / mt;
  const double tdd = (p.gravity * st - ct * tmp) /
                     (p.pole_half_length *
                      (4.0 / 3.0 - p.pole_mass * ct * ct / mt));
  State d(4);
  d[0] = s[1];
  d[1] = tmp - p.pole_mass * p.pole_half_length * tdd * ct / mt;
  d[2] = s[3];
  d[3] = tdd;
  return d;
}

State ref_acrobot(const Plant& p, const State& s, double u) {
  const double m = p.link_mass, l1 = p.link_length, lc = p.link_com;
  const double I = p.link_inertia, g = p.gravity;
  const double c2 = std::cos(s[1]), s2 = std::sin(s[1]);
  const double d1 =
      m * lc * lc + m * (l1 * l1 + lc * lc + 2 * l1 * lc * c2) + 2 * I;
  const double d2 = m * (lc * lc + l1 * lc * c2) + I;
  const double phi2 = m * lc * g * std::cos(s[0] + s[1] - M_PI / 2);
  const double phi1 = -m * l1 * lc * s[3] * s[3] * s2 -
                      2 * m * l1 * lc * s[3] * s[2] * s2 +
                      (m * lc + m * l1) * g * std::cos(s[0] - M_PI / 2) + phi2;
  const double ddq2 = (u + d2 / d1 * phi1 - m * l1 * lc * s[2] * s[2] * s2 -
                       phi2) /
                      (m * lc * lc + I - d2 * d2 / d1);
  State d(4);
  d[0] = s[2];
  d[1] = s[3];
  d[2] = -(d2 * ddq2 + phi1) / d1;
  d[3] = ddq2;
  return d;
}

template <typename Rhs>
State euler_reference(const Plant& p, const Rhs& rhs, State s, double u,
                      int substeps) {
  const double h = p.dt / substeps;
  for (int i = 0; i < substeps; ++i) s += h * rhs(p, s, u);
  return s;
}

}  // namespace

TEST_CASE("one integration step tracks a 1000-substep Euler reference") {
  {
    const Plant p = Plant::pendulum();
    const State s = (State(2) << 2.0, 1.0).finished();
    const State got = mpctune::env::step(p, s, 1.5);
    const State want = euler_reference(p, ref_pendulum, s, 1.5, 1000);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-4);
  }
  {
    const Plant p = Plant::cartpole();
    const State s = (State(4) << 0.1, -0.5, 0.3, 0.8).finished();
    const State got = mpctune::env::step(p, s, 5.0);
    const State want = euler_reference(p, ref_cartpole, s, 5.0, 1000);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-4);
  }
  {
    const Plant p = Plant::acrobot();
    const State s = (State(4) << 0.5, -0.3, 1.0, -0.8).finished();
    const State got = mpctune::env::step(p, s, 0.7);
    const State want = euler_reference(p, ref_acrobot, s, 0.7, 1000);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("unactuated equilibria are fixed points of the step") {
  {
    const Plant p = Plant::pendulum();
    const State s = (State(2) << M_PI, 0.0).finished();
    CHECK((mpctune::env::step(p, s, 0.0) - s).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const Plant p = Plant::cartpole();
    const State s = State::Zero(4);
    CHECK((mpctune::env::step(p, s, 0.0) - s).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const Plant p = Plant::acrobot();
    const State s = State::Zero(4);
    CHECK((mpctune::env::step(p, s, 0.0) - s).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rewards match their closed forms on random states") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    {
      const Plant p = Plant::pendulum();
      const State s = (State(2) << u(eng), u(eng)).finished();
      const double want =
          -(50.0 * std::pow(std::cos(s[0]) - 1.0, 2) + s[1] * s[1]) + 4000.0;
      CHECK(mpctune::env::reward(p, s, 0.0) == doctest::Approx(want).epsilon(1e-12));
    }
    {
      const Plant p = Plant::cartpole();
      const State s = (State(4) << u(eng), u(eng), u(eng), u(eng)).finished();
      const double want = -(s[0] * s[0] + 500.0 * std::pow(std::sin(s[2]), 2) +
                            s[1] * s[1] + s[3] * s[3]);
      CHECK(mpctune::env::reward(p, s, 0.0) == doctest::Approx(want).epsilon(1e-12));
    }
    {
      const Plant p = Plant::acrobot();
      const State s = (State(4) << u(eng), u(eng), u(eng), u(eng)).finished();
      const double want = std::cos(s[0]) - std::cos(s[0] + s[1]);
      CHECK(mpctune::env::reward(p, s, 0.0) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("rewards never exceed the stated upper bound") {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (const Plant& p :
       {Plant::pendulum(), Plant::cartpole(), Plant::acrobot()}) {
    const double ub = mpctune::env::reward_upper_bound(p);
    for (int i = 0; i < 10000; ++i) {
      State s(p.state_dim);
      for (int k = 0; k < p.state_dim; ++k) s[k] = u(eng);
      CHECK(mpctune::env::reward(p, s, 0.0) <= ub + 1e-12);
    }
  }
}

TEST_CASE("out-of-range actions behave exactly like the clamped action") {
  const Plant p = Plant::pendulum();
  const State s = (State(2) << 1.0, -0.5).finished();
  const State hi = mpctune::env::step(p, s, 99.0);
  const State at_bound = mpctune::env::step(p, s, p.action_max);
  CHECK((hi - at_bound).cwiseAbs().maxCoeff() == 0.0);
  const State lo = mpctune::env::step(p, s, -99.0);
  const State at_lo = mpctune::env::step(p, s, p.action_min);
  CHECK((lo - at_lo).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unactuated pendulum conserves energy over 1000 steps") {
  const Plant p = Plant::pendulum();
  auto energy = [&](const State& s) {
    const double inertia = p.mass * p.length * p.length / 3.0;
    return 0.5 * inertia * s[1] * s[1] +
           p.mass * p.gravity * (p.length / 2.0) * std::cos(s[0]);
  };
  State s = (State(2) << 2.0, 0.0).finished();
  const double e0 = energy(s);
  const double scale = p.mass * p.gravity * p.length / 2.0;
  double max_drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    s = mpctune::env::step(p, s, 0.0);
    max_drift = std::max(max_drift, std::abs(energy(s) - e0));
  }
  CHECK(max_drift < 0.01 * scale);
}

TEST_CASE("initial-state sampling stays in bounds with the right mean") {
  for (const Plant& p :
       {Plant::pendulum(), Plant::cartpole(), Plant::acrobot()}) {
    mpctune::rng::Engine eng(123);
    const int n = 10000;
    State mean = State::Zero(p.state_dim);
    for (int i = 0; i < n; ++i) {
      const State s = mpctune::env::sample_initial_state(p, eng);
      for (int k = 0; k < p.state_dim; ++k) {
        CHECK(s[k] >= p.init.center[k] - p.init.halfwidth[k]);
        CHECK(s[k] <= p.init.center[k] + p.init.halfwidth[k]);
      }
      mean += s;
    }
    mean /= n;
    for (int k = 0; k < p.state_dim; ++k) {
      // 4-sigma band for the mean of n uniform draws.
      const double sd = p.init.halfwidth[k] / std::sqrt(3.0);
      CHECK(std::abs(mean[k] - p.init.center[k]) <= 4.0 * sd / std::sqrt(n) + 1e-12);
    }
  }
}

TEST_CASE("step rejects malformed states") {
  const Plant p = Plant::pendulum();
  State bad = (State(2) << std::nan(""), 0.0).finished();
  CHECK_THROWS_AS(mpctune::env::step(p, bad, 0.0), std::domain_error);
  State wrong = State::Zero(3);
  CHECK_THROWS_AS(mpctune::env::step(p, wrong, 0.0), std::domain_error);
}
