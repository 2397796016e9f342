#include "mpctune/mppi.hpp"

#include <cmath>
#include <limits>

namespace mpctune::mppi {

double rollout_cost(const env::Plant& p, const env::State& start,
                    const Eigen::VectorXd& controls, double penalty) {
  const double upper = env::reward_upper_bound(p);
  double cost = 0.0;
  env::State s = start;
  for (int i = 0; i < controls.size(); ++i) {
    s = env::step(p, s, controls[i]);
    if (!s.allFinite()) return cost + penalty;
    cost += upper - env::reward(p, s, controls[i]);
  }
  return cost;
}

WeightResult compute_weights(const Eigen::VectorXd& costs,
                             const Eigen::VectorXd& coupling,
                             const MppiConfig& cfg) {
  const int m = static_cast<int>(costs.size());
  const double sig2 = cfg.sigma_eps * cfg.sigma_eps;
  Eigen::VectorXd expo(m);
  for (int j = 0; j < m; ++j) {
    double e = costs[j] / cfg.lambda;
    if (sig2 > 0.0) e += coupling[j] / sig2;
    expo[j] = e;
  }

  WeightResult out;
  out.weights = Eigen::VectorXd::Constant(m, 1.0 / m);
  if (!expo.allFinite()) {
    out.degenerate = true;
    return out;
  }
  const double shift = expo.minCoeff();
  Eigen::VectorXd w(m);
  for (int j = 0; j < m; ++j) w[j] = std::exp(-(expo[j] - shift));
  const double total = w.sum();
  if (!std::isfinite(total) || total <= 0.0) {
    out.degenerate = true;
    return out;
  }
  out.weights = w / total;
  return out;
}

Eigen::VectorXd update_actions(const Eigen::VectorXd& actions,
                               const Eigen::VectorXd& weights,
                               const Eigen::MatrixXd& perturbations) {
  return actions + perturbations.transpose() * weights;
}

Controller::Controller(MppiConfig cfg) : cfg_(cfg) { reset(); }

void Controller::reset() {
  actions_ = Eigen::VectorXd::Zero(cfg_.horizon);
  last_degenerate_ = false;
}

double Controller::step(const env::Plant& p, const env::State& s,
                        rng::Engine& eng) {
  const int m = cfg_.rollouts, t = cfg_.horizon;
  std::normal_distribution<double> gauss(0.0, cfg_.sigma_eps);

  Eigen::MatrixXd eps(m, t);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < t; ++i) eps(j, i) = gauss(eng);

  Eigen::VectorXd costs(m), coupling(m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd v = actions_ + eps.row(j).transpose();
    costs[j] = rollout_cost(p, s, v, cfg_.divergence_penalty);
    coupling[j] = actions_.dot(v);
  }

  const WeightResult wr = compute_weights(costs, coupling, cfg_);
  last_degenerate_ = wr.degenerate;
  actions_ = update_actions(actions_, wr.weights, eps);

  const double a0 = env::clamp_action(p, actions_[0]);
  // Receding horizon: shift the plan one step left, zero-fill the tail.
  for (int i = 0; i + 1 < t; ++i) actions_[i] = actions_[i + 1];
  actions_[t - 1] = 0.0;
  return a0;
}

EpisodeResult run_episode(const env::Plant& p, const MppiConfig& cfg,
                          int n_steps, rng::Engine& eng,
                          bool keep_trajectory) {
  Controller ctrl(cfg);
  env::State s = env::sample_initial_state(p, eng);
  EpisodeResult out;
  if (keep_trajectory) out.trajectory.reserve(n_steps);
  for (int i = 0; i < n_steps; ++i) {
    const double a = ctrl.step(p, s, eng);
    const env::State next = env::step(p, s, a);
    if (!next.allFinite()) {
      out.truncated = true;
      break;
    }
    const double r = env::reward(p, next, a);
    out.episode_return += r;
    if (keep_trajectory)
      out.trajectory.push_back({(i + 1) * p.dt, next, a, r});
    s = next;
  }
  return out;
}

}  // namespace mpctune::mppi
