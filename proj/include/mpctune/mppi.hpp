#pragma once

#include <Eigen/Core>
#include <vector>

#include "mpctune/env.hpp"
#include "mpctune/rng.hpp"

namespace mpctune::mppi {

struct MppiConfig {
  double lambda = 1.0;      // temperature of the exponential weighting
  double sigma_eps = 1.0;   // std of the control perturbations
  int horizon = 10;         // lookahead steps T
  int rollouts = 10;        // sampled trajectories M per control step
  double divergence_penalty = 1e9;  // cost charged once a rollout blows up
};

// Cost of simulating `controls` open-loop from `start`: per-step state cost
// is the gap between the reward and its upper bound, so it is nonnegative.
// A rollout that leaves the finite-state region collects the penalty once
// and stops accumulating.
double rollout_cost(const env::Plant& p, const env::State& start,
                    const Eigen::VectorXd& controls, double penalty = 1e9);

struct WeightResult {
  Eigen::VectorXd weights;   // normalised, sums to 1
  bool degenerate = false;   // all weights collapsed to non-finite values
};

// Exponential trajectory weights from rollout costs and the control-coupling
// terms sum_i a_i * v_i.  The smallest exponent is shifted to zero before
// exponentiation; if every weight still underflows or turns non-finite the
// result falls back to uniform and is flagged.
WeightResult compute_weights(const Eigen::VectorXd& costs,
                             const Eigen::VectorXd& coupling,
                             const MppiConfig& cfg);

// Weighted perturbation average: a_i + sum_j w_j eps_ij.
Eigen::VectorXd update_actions(const Eigen::VectorXd& actions,
                               const Eigen::VectorXd& weights,
                               const Eigen::MatrixXd& perturbations);

// Receding-horizon controller holding the running action plan.
class Controller {
 public:
  explicit Controller(MppiConfig cfg);

  // One control step: sample M perturbed plans, reweight, emit the first
  // action (clamped to the plant's bounds), shift the plan left with a zero
  // tail.
  double step(const env::Plant& p, const env::State& s, rng::Engine& eng);

  void reset();
  const Eigen::VectorXd& plan() const { return actions_; }
  bool last_degenerate() const { return last_degenerate_; }

 private:
  MppiConfig cfg_;
  Eigen::VectorXd actions_;
  bool last_degenerate_ = false;
};

struct TraceRow {
  double time = 0.0;
  env::State state;
  double action = 0.0;
  double reward = 0.0;
};

struct EpisodeResult {
  double episode_return = 0.0;
  bool truncated = false;  // plant state left the finite region early
  std::vector<TraceRow> trajectory;
};

// Closed-loop episode: sample an initial state, run the controller for
// n_steps control intervals, accumulate the per-step rewards.
EpisodeResult run_episode(const env::Plant& p, const MppiConfig& cfg,
                          int n_steps, rng::Engine& eng,
                          bool keep_trajectory = false);

}  // namespace mpctune::mppi
