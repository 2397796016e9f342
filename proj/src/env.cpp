#include "mpctune/env.hpp"

#include <cmath>
#include <stdexcept>

namespace mpctune::env {

Plant Plant::pendulum() {
  Plant p;
  p.kind = PlantKind::pendulum;
  p.action_min = -2.0;
  p.action_max = 2.0;
  p.state_dim = 2;
  p.init.center = Eigen::Vector2d(M_PI, 0.0);
  p.init.halfwidth = Eigen::Vector2d(0.1, 0.0);
  return p;
}

Plant Plant::cartpole() {
  Plant p;
  p.kind = PlantKind::cartpole;
  p.action_min = -10.0;
  p.action_max = 10.0;
  p.state_dim = 4;
  p.init.center = Eigen::Vector4d::Zero();
  p.init.halfwidth = Eigen::Vector4d(0.05, 0.05, 0.05, 0.05);
  return p;
}

Plant Plant::acrobot() {
  Plant p;
  p.kind = PlantKind::acrobot;
  p.action_min = -1.0;
  p.action_max = 1.0;
  p.state_dim = 4;
  p.init.center = Eigen::Vector4d::Zero();
  p.init.halfwidth = Eigen::Vector4d(0.1, 0.1, 0.1, 0.1);
  return p;
}

Plant Plant::by_name(const std::string& name) {
  if (name == "pendulum") return pendulum();
  if (name == "cartpole") return cartpole();
  if (name == "acrobot") return acrobot();
  throw std::invalid_argument("unknown plant: " + name);
}

std::string Plant::name() const {
  switch (kind) {
    case PlantKind::pendulum: return "pendulum";
    case PlantKind::cartpole: return "cartpole";
    case PlantKind::acrobot: return "acrobot";
  }
  return "?";
}

double clamp_action(const Plant& p, double a) {
  return std::min(std::max(a, p.action_min), p.action_max);
}

namespace {

State pendulum_rhs(const Plant& p, const State& s, double u) {
  // Uniform rod pivoted at one end, angle measured from upright:
  // I = m l^2 / 3, theta_dd = (m g (l/2) sin(theta) + u) / I.
  const double theta = s[0], theta_dot = s[1];
  State ds(2);
  ds[0] = theta_dot;
  ds[1] = 3.0 * p.gravity / (2.0 * p.length) * std::sin(theta) +
          3.0 / (p.mass * p.length * p.length) * u;
  return ds;
}

State cartpole_rhs(const Plant& p, const State& s, double u) {
  const double x_dot = s[1], theta = s[2], theta_dot = s[3];
  const double sin_t = std::sin(theta), cos_t = std::cos(theta);
  const double total = p.cart_mass + p.pole_mass;
  const double ml = p.pole_mass * p.pole_half_length;
  const double tmp = (u + ml * theta_dot * theta_dot * sin_t) / total;
  const double theta_dd =
      (p.gravity * sin_t - cos_t * tmp) /
      (p.pole_half_length *
       (4.0 / 3.0 - p.pole_mass * cos_t * cos_t / total));
  const double x_dd = tmp - ml * theta_dd * cos_t / total;
  State ds(4);
  ds[0] = x_dot;
  ds[1] = x_dd;
  ds[2] = theta_dot;
  ds[3] = theta_dd;
  return ds;
}

State acrobot_rhs(const Plant& p, const State& s, double u) {
  const double m = p.link_mass, l1 = p.link_length;
  const double lc = p.link_com, I = p.link_inertia, g = p.gravity;
  const double q1 = s[0], q2 = s[1], dq1 = s[2], dq2 = s[3];
  const double c2 = std::cos(q2), s2 = std::sin(q2);

  const double d1 = m * lc * lc + m * (l1 * l1 + lc * lc + 2.0 * l1 * lc * c2) +
                    2.0 * I;
  const double d2 = m * (lc * lc + l1 * lc * c2) + I;
  const double phi2 = m * lc * g * std::cos(q1 + q2 - M_PI / 2.0);
  const double phi1 = -m * l1 * lc * dq2 * dq2 * s2 -
                      2.0 * m * l1 * lc * dq2 * dq1 * s2 +
                      (m * lc + m * l1) * g * std::cos(q1 - M_PI / 2.0) + phi2;
  const double ddq2 =
      (u + d2 / d1 * phi1 - m * l1 * lc * dq1 * dq1 * s2 - phi2) /
      (m * lc * lc + I - d2 * d2 / d1);
  const double ddq1 = -(d2 * ddq2 + phi1) / d1;

  State ds(4);
  ds[0] = dq1;
  ds[1] = dq2;
  ds[2] = ddq1;
  ds[3] = ddq2;
  return ds;
}

}  // namespace

State dynamics(const Plant& p, const State& s, double a) {
  switch (p.kind) {
    case PlantKind::pendulum: return pendulum_rhs(p, s, a);
    case PlantKind::cartpole: return cartpole_rhs(p, s, a);
    case PlantKind::acrobot: return acrobot_rhs(p, s, a);
  }
  throw std::logic_error("unreachable");
}

State step(const Plant& p, const State& s, double a) {
  if (s.size() != p.state_dim)
    throw std::domain_error("step: state has wrong dimension");
  if (!s.allFinite()) throw std::domain_error("step: non-finite state");
  const double u = clamp_action(p, a);
  const double h = p.dt;
  const State k1 = dynamics(p, s, u);
  const State k2 = dynamics(p, s + 0.5 * h * k1, u);
  const State k3 = dynamics(p, s + 0.5 * h * k2, u);
  const State k4 = dynamics(p, s + h * k3, u);
  return s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double reward(const Plant& p, const State& s, double /*a*/) {
  switch (p.kind) {
    case PlantKind::pendulum: {
      const double c = std::cos(s[0]) - 1.0;
      return -(50.0 * c * c + s[1] * s[1]) + 4000.0;
    }
    case PlantKind::cartpole: {
      const double st = std::sin(s[2]);
      return -(s[0] * s[0] + 500.0 * st * st + s[1] * s[1] + s[3] * s[3]);
    }
    case PlantKind::acrobot:
      return std::cos(s[0]) - std::cos(s[0] + s[1]);
  }
  throw std::logic_error("unreachable");
}

double reward_upper_bound(const Plant& p) {
  switch (p.kind) {
    case PlantKind::pendulum: return 4000.0;
    case PlantKind::cartpole: return 0.0;
    case PlantKind::acrobot: return 2.0;
  }
  throw std::logic_error("unreachable");
}

State sample_initial_state(const Plant& p, rng::Engine& eng) {
  State s = p.init.center;
  for (int i = 0; i < s.size(); ++i) {
    const double hw = p.init.halfwidth[i];
    if (hw > 0.0) {
      std::uniform_real_distribution<double> u(-hw, hw);
      s[i] += u(eng);
    }
  }
  return s;
}

}  // namespace mpctune::env
