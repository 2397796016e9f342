#include "mpctune/bayesopt.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mpctune/opt.hpp"
#include "mpctune/sobol.hpp"

namespace mpctune::bo {

double ucb(const gp::Model& model, const Eigen::VectorXd& x, double kappa) {
  const auto p = model.posterior(x);
  return p.mean + kappa * std::sqrt(p.variance);
}

Eigen::VectorXd maximize_acquisition(const gp::Model& model, const Box& box,
                                     double kappa, rng::Engine& eng,
                                     int starts, int evals) {
  const int d = box.dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto objective = [&](const Eigen::VectorXd& x) {
    return ucb(model, x, kappa);
  };

  Eigen::VectorXd best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x0(d);
    for (int k = 0; k < d; ++k)
      x0[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * unif(eng);
    const auto r =
        opt::nelder_mead_max(objective, x0, box.lower, box.upper, evals);
    if (r.value > best_value) {
      best_value = r.value;
      best = r.x;
    }
  }
  if (best.size() == 0)
    throw std::runtime_error("acquisition: no finite acquisition value");
  return box.clamp(best);
}

ObservationRecord observe(const EpisodeFn& fn, const Eigen::VectorXd& x,
                          int n_r, const RewardScaler& scaler,
                          std::uint64_t obs_seed, int iteration, bool timing) {
  const auto t0 = std::chrono::steady_clock::now();
  ObservationRecord rec;
  rec.x = x;
  rec.iteration = iteration;
  rec.episode_returns.reserve(n_r);
  double acc = 0.0;
  for (int j = 0; j < n_r; ++j) {
    const double g =
        fn(x, rng::derive(obs_seed, {static_cast<std::uint64_t>(j)}));
    rec.episode_returns.push_back(g);
    acc += g;
  }
  rec.y = scaler(acc / n_r);
  if (timing)
    rec.wall_time_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return rec;
}

PilotResult run_pilot(const EpisodeFn& fn, const Box& box, int points, int n_r,
                      std::uint64_t master_seed) {
  const int d = box.dim();
  PilotResult out;
  out.point_inputs.resize(points, d);
  out.point_means.resize(points);
  out.episode_inputs.resize(points * n_r, d);
  out.episode_returns.resize(points * n_r);

  Sobol sobol(d);
  for (int i = 0; i < points; ++i) {
    const Eigen::VectorXd u = sobol.next();
    const Eigen::VectorXd x =
        box.lower.array() + u.array() * (box.upper - box.lower).array();
    out.point_inputs.row(i) = x.transpose();
    double acc = 0.0;
    for (int j = 0; j < n_r; ++j) {
      const double g = fn(
          x, rng::derive(master_seed, {rng::pilot_stream,
                                       static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j)}));
      out.episode_inputs.row(i * n_r + j) = x.transpose();
      out.episode_returns[i * n_r + j] = g;
      acc += g;
    }
    out.point_means[i] = acc / n_r;
  }
  out.scaler.g_min = out.point_means.minCoeff();
  out.scaler.g_max = out.point_means.maxCoeff();
  return out;
}

namespace {

noise::FeatureMap build_feature_map(const BoConfig& cfg, const Box& box,
                                    const PilotResult& pilot,
                                    std::uint64_t master_seed) {
  if (cfg.feature_kind == noise::FeatureKind::polynomial) {
    // Cap the degree so the noise regression stays determined: keep at
    // least five episode samples per coefficient (the additive map has
    // 1 + d * degree terms), but never drop below a linear model.  An
    // unchecked high degree in several dimensions leaves nearly as many
    // coefficients as data points and the fit rings at the box edges.
    const double budget =
        std::max(3.0, static_cast<double>(pilot.episode_inputs.rows()) / 5.0);
    int degree = cfg.poly_degree;
    while (degree > 1 && 1.0 + box.dim() * degree > budget) --degree;
    return noise::FeatureMap::polynomial(degree, box.lower, box.upper);
  }
  // Kernel features sit on clusters of the normalised pilot design.
  const auto probe =
      noise::FeatureMap::polynomial(1, box.lower, box.upper);
  Eigen::MatrixXd norm(pilot.episode_inputs.rows(), box.dim());
  for (int i = 0; i < norm.rows(); ++i)
    norm.row(i) = probe.normalise(pilot.episode_inputs.row(i)).transpose();
  rng::Engine eng = rng::engine_at(master_seed, {rng::feature_stream});
  const Eigen::MatrixXd centres =
      noise::kmeans_centres(norm, cfg.kernel_features, eng);
  return noise::FeatureMap::kernel(centres, cfg.kernel_shape,
                                   cfg.kernel_lengthscale, box.lower,
                                   box.upper);
}

}  // namespace

BoResult run_bo(const EpisodeFn& fn, const Box& box, const BoConfig& cfg,
                std::uint64_t master_seed, const PilotResult* pilot_in) {
  BoResult out;
  const int d = box.dim();

  PilotResult pilot_own;
  if (!pilot_in) {
    pilot_own = run_pilot(fn, box, cfg.pilot_points, cfg.n_r, master_seed);
    pilot_in = &pilot_own;
  }
  const PilotResult& pilot = *pilot_in;
  out.scaler = cfg.fixed_scaler.value_or(pilot.scaler);

  const Eigen::VectorXd scaled_points =
      pilot.point_means.unaryExpr([&](double g) { return out.scaler(g); });
  const Eigen::VectorXd scaled_episodes =
      pilot.episode_returns.unaryExpr([&](double g) { return out.scaler(g); });

  out.feature_map = build_feature_map(cfg, box, pilot, master_seed);

  // Stage 1: location-dependent noise from the episode-level pilot data.
  if (cfg.fixed_noise) {
    out.noise_model = *cfg.fixed_noise;
  } else if (cfg.mode == gp::NoiseMode::heteroscedastic) {
    const auto trend = noise::fit_trend(pilot.episode_inputs, scaled_episodes,
                                        out.feature_map);
    out.noise_model = noise::fit_noise(pilot.episode_inputs, scaled_episodes,
                                       trend, out.feature_map);
    // The model was fitted on single episodes; observations average n_r of
    // them, which divides the noise std by sqrt(n_r).
    const double shrink = 1.0 / std::sqrt(static_cast<double>(cfg.n_r));
    out.noise_model.z *= shrink;
    out.noise_model.zeta *= shrink;
  } else {
    out.noise_model.z = 0.0;
    out.noise_model.zeta = 0.0;
    out.noise_model.beta = Eigen::VectorXd::Zero(out.feature_map.output_dim());
  }

  // Stage 2: one-off kernel fit on the pilot point means; theta then stays
  // fixed for the whole online phase.
  if (cfg.fixed_theta) {
    out.theta = *cfg.fixed_theta;
  } else {
    // Per-point noise profile of the pilot design for the likelihood fit.
    Eigen::VectorXd noise_exp(pilot.point_inputs.rows());
    for (int i = 0; i < noise_exp.size(); ++i)
      noise_exp[i] = out.noise_model.exponent_factor(out.feature_map,
                                                     pilot.point_inputs.row(i));
    const double sd = std::sqrt(
        (scaled_points.array() - scaled_points.mean()).square().sum() /
        std::max(1, static_cast<int>(scaled_points.size()) - 1));
    gp::Hyper h0;
    h0.kernel.amplitude = std::max(1.0, sd);
    h0.kernel.lengthscales = (box.upper - box.lower) / 2.0;
    h0.sigma_nu = std::max(0.01, 0.2 * sd);
    h0.z = std::max(1e-6, out.noise_model.z);
    rng::Engine fit_eng = rng::engine_at(master_seed, {rng::theta_fit_stream});
    const auto fit = gp::fit_hyperparams(
        pilot.point_inputs, scaled_points, cfg.prior_mean, h0, cfg.mode,
        noise_exp, out.noise_model.zeta, fit_eng, cfg.fit);
    out.theta = fit.hyper;
    out.theta_improved = fit.improved;
  }
  if (cfg.mode == gp::NoiseMode::heteroscedastic && !cfg.fixed_noise)
    out.noise_model.z = out.theta.z;

  auto noise_var_at = [&](const Eigen::VectorXd& x) {
    if (cfg.mode == gp::NoiseMode::homoscedastic)
      return out.theta.sigma_nu * out.theta.sigma_nu;
    const double sd = out.noise_model.std(out.feature_map, x);
    return sd * sd;
  };

  // Online phase: start point, then acquisition-driven queries.
  gp::Dataset data;
  data.inputs.resize(0, d);
  auto add_observation = [&](const ObservationRecord& rec) {
    const int n = data.size();
    data.inputs.conservativeResize(n + 1, d);
    data.inputs.row(n) = rec.x.transpose();
    data.targets.conservativeResize(n + 1);
    data.targets[n] = rec.y;
    data.noise_var.conservativeResize(n + 1);
    data.noise_var[n] = noise_var_at(rec.x);
    out.trace.push_back(rec);
  };

  const Eigen::VectorXd start =
      cfg.start.size() == d ? box.clamp(cfg.start) : box.lower;
  add_observation(observe(fn, start, cfg.n_r, out.scaler,
                          rng::derive(master_seed, {rng::online_stream, 0}), 0,
                          cfg.timing));

  for (int t = 1; t <= cfg.iterations; ++t) {
    try {
      const gp::Model model(out.theta.kernel, cfg.prior_mean, data);
      rng::Engine acq_eng = rng::engine_at(
          master_seed,
          {rng::acquisition_stream, static_cast<std::uint64_t>(t)});
      const Eigen::VectorXd xq = maximize_acquisition(
          model, box, cfg.kappa, acq_eng, cfg.acq_starts, cfg.acq_evals);
      ObservationRecord rec = observe(
          fn, xq, cfg.n_r, out.scaler,
          rng::derive(master_seed,
                      {rng::online_stream, static_cast<std::uint64_t>(t)}),
          t, cfg.timing);
      const auto pred = model.posterior(xq);
      rec.post_mean = pred.mean;
      rec.post_sd = std::sqrt(pred.variance);
      add_observation(rec);
    } catch (const std::runtime_error& e) {
      out.aborted = true;
      out.abort_reason = e.what();
      break;
    }
  }

  // Incumbent: the observed input whose posterior mean under the final
  // model is highest; earliest observation wins ties.
  try {
    const gp::Model final_model(out.theta.kernel, cfg.prior_mean, data);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& rec : out.trace) {
      const double m = final_model.posterior(rec.x).mean;
      if (m > best) {
        best = m;
        out.best_x = rec.x;
      }
    }
    out.best_value = best;
  } catch (const std::runtime_error& e) {
    out.aborted = true;
    out.abort_reason = e.what();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& rec : out.trace)
      if (rec.y > best) {
        best = rec.y;
        out.best_x = rec.x;
        out.best_value = rec.y;
      }
  }
  return out;
}

}  // namespace mpctune::bo
