#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mpctune/gp.hpp"
#include "mpctune/noise_model.hpp"
#include "mpctune/rng.hpp"

namespace mpctune::bo {

struct Box {
  Eigen::VectorXd lower, upper;
  int dim() const { return static_cast<int>(lower.size()); }
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
  bool contains(const Eigen::VectorXd& x) const {
    return (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }
};

// Affine map of raw episode returns onto [0, 100], anchored at the pilot
// minimum and maximum.  A degenerate pilot (flat returns) falls back to a
// pure offset so downstream code still sees finite values.
struct RewardScaler {
  double g_min = 0.0;
  double g_max = 100.0;
  double operator()(double g) const {
    const double range = g_max - g_min;
    return range > 0.0 ? 100.0 * (g - g_min) / range : g - g_min;
  }
};

// A tunable objective: one episode at hyper-parameters x, seeded
// deterministically.  Returns the raw episode return.
using EpisodeFn =
    std::function<double(const Eigen::VectorXd& x, std::uint64_t seed)>;

struct ObservationRecord {
  Eigen::VectorXd x;
  std::vector<double> episode_returns;  // raw, one per repeat
  double y = 0.0;  // scaled mean of the repeats
  int iteration = 0;  // 0 is the predefined start point
  // Model prediction at x before observing; NaN when no model existed yet.
  double post_mean = std::numeric_limits<double>::quiet_NaN();
  double post_sd = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
};

struct PilotResult {
  Eigen::MatrixXd point_inputs;     // points x d
  Eigen::VectorXd point_means;      // raw mean return per point
  Eigen::MatrixXd episode_inputs;   // (points * n_r) x d
  Eigen::VectorXd episode_returns;  // raw, episode level
  RewardScaler scaler;
};

struct BoConfig {
  int iterations = 30;     // online queries after the start observation
  int n_r = 5;             // episodes averaged per observation
  double kappa = 1.2;      // exploration weight of the acquisition
  int pilot_points = 20;   // quasirandom offline design size
  double prior_mean = 50.0;
  gp::NoiseMode mode = gp::NoiseMode::heteroscedastic;

  // Noise-model features over the search box.
  noise::FeatureKind feature_kind = noise::FeatureKind::polynomial;
  int poly_degree = 10;
  int kernel_features = 5;
  double kernel_shape = 1.0;
  double kernel_lengthscale = 0.25;

  int acq_starts = 32;     // multi-start budget of the acquisition maximiser
  int acq_evals = 120;     // simplex evaluations per start
  gp::FitOptions fit;      // hyper-parameter fit budget

  Eigen::VectorXd start;   // predefined first query; empty = lower corner

  // Injection points for reduction and regression testing: any of these
  // skips the corresponding fitting stage.
  std::optional<gp::Hyper> fixed_theta;
  std::optional<noise::NoiseModel> fixed_noise;
  std::optional<RewardScaler> fixed_scaler;

  bool timing = false;     // stamp wall time per observation when true
};

struct BoResult {
  std::vector<ObservationRecord> trace;
  Eigen::VectorXd best_x;   // observed point with the highest posterior mean
  double best_value = 0.0;  // that posterior mean, in scaled units
  gp::Hyper theta;
  bool theta_improved = false;
  noise::NoiseModel noise_model;
  noise::FeatureMap feature_map;
  RewardScaler scaler;
  bool aborted = false;     // model failure ended the loop early
  std::string abort_reason;
};

double ucb(const gp::Model& model, const Eigen::VectorXd& x, double kappa);

// Multi-start bounded maximisation of the acquisition; ties between equally
// good local optima resolve to the earliest start.
Eigen::VectorXd maximize_acquisition(const gp::Model& model, const Box& box,
                                     double kappa, rng::Engine& eng,
                                     int starts = 32, int evals = 120);

// One observation: n_r episodes at x seeded derive(obs_seed, {j}), raw
// returns kept, scaled mean reported.
ObservationRecord observe(const EpisodeFn& fn, const Eigen::VectorXd& x,
                          int n_r, const RewardScaler& scaler,
                          std::uint64_t obs_seed, int iteration,
                          bool timing = false);

// Quasirandom offline design over the box with the scaler anchored at the
// per-point means.
PilotResult run_pilot(const EpisodeFn& fn, const Box& box, int points, int n_r,
                      std::uint64_t master_seed);

// Full tuning loop: pilot, noise/trend fit, one-off hyper-parameter fit,
// then `iterations` rounds of acquisition maximisation and observation.
// `pilot` may supply a precomputed design (it must have been produced with
// the same master seed); otherwise the pilot runs internally.
BoResult run_bo(const EpisodeFn& fn, const Box& box, const BoConfig& cfg,
                std::uint64_t master_seed, const PilotResult* pilot = nullptr);

}  // namespace mpctune::bo
