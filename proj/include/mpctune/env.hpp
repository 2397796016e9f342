#pragma once

#include <Eigen/Core>
#include <string>

#include "mpctune/rng.hpp"

namespace mpctune::env {

using State = Eigen::VectorXd;

enum class PlantKind { pendulum, cartpole, acrobot };

// Uniform initial-state distribution, independent per component:
// s[i] ~ U(center[i] - halfwidth[i], center[i] + halfwidth[i]).
struct InitDist {
  Eigen::VectorXd center;
  Eigen::VectorXd halfwidth;
};

// A simulated plant: continuous dynamics integrated with one RK4 step per
// control interval, a scalar bounded action, and a per-step reward.
//
// State layouts:
//   pendulum: [theta, theta_dot]            theta = 0 upright
//   cartpole: [x, x_dot, theta, theta_dot]  theta = 0 upright
//   acrobot:  [q1, q2, q1_dot, q2_dot]      q1 = 0 hanging, q2 relative
struct Plant {
  PlantKind kind = PlantKind::pendulum;
  double dt = 0.05;
  double action_min = -1.0;
  double action_max = 1.0;
  double gravity = 9.81;

  // Pendulum: uniform rod of mass `mass`, length `length`, pivoted at one
  // end, torque-actuated at the pivot.
  double mass = 1.0;
  double length = 1.0;

  // Cartpole: force-actuated cart with a pole of half-length
  // `pole_half_length`.
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double pole_half_length = 0.5;

  // Acrobot: two identical links, torque applied at the middle joint.
  double link_mass = 1.0;
  double link_length = 1.0;
  double link_com = 0.5;
  double link_inertia = 1.0;

  InitDist init;
  int state_dim = 0;
  int episode_steps = 200;

  static Plant pendulum();
  static Plant cartpole();
  static Plant acrobot();
  static Plant by_name(const std::string& name);
  std::string name() const;
};

double clamp_action(const Plant& p, double a);

// Time derivative of the state under a held (already clamped) action.
State dynamics(const Plant& p, const State& s, double a);

// One control interval: clamp the action and advance dt with a single
// classic RK4 step.  Throws std::domain_error if the incoming state has the
// wrong dimension or non-finite entries.
State step(const Plant& p, const State& s, double a);

// Instantaneous reward of being in state s (the action is cost-free).
double reward(const Plant& p, const State& s, double a);

// Least upper bound of reward() over the reachable state space, used to
// convert rewards into the nonnegative costs the controller consumes.
double reward_upper_bound(const Plant& p);

State sample_initial_state(const Plant& p, rng::Engine& eng);

}  // namespace mpctune::env
