#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mpctune/harness.hpp"

namespace fs = std::filesystem;
using namespace mpctune;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct Options {
  std::string task = "pendulum";
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool timing = false;
};

harness::ExperimentConfig resolve_config(const Options& opt) {
  harness::ExperimentConfig cfg =
      opt.config_path.empty() ? harness::ExperimentConfig::for_task(opt.task)
                              : harness::load_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
  if (opt.timing) cfg.timing = true;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

int run_sweep(const Options& opt, const std::string& axis_arg, int grid,
              int repeats) {
  const auto cfg = resolve_config(opt);
  const auto axis = harness::axis_by_name(axis_arg);
  const auto res = harness::run_grid_sweep(cfg, axis, grid, repeats, opt.seed);
  for (std::size_t j = 0; j < res.points.size(); ++j)
    if (!res.points[j].error.empty())
      std::cerr << "notice: sweep point " << j << " failed: "
                << res.points[j].error << "\n";
  const std::string base = "sweep_" + harness::axis_name(axis);
  const auto points_path = join(cfg.out_dir, base + ".csv");
  const auto episodes_path = join(cfg.out_dir, base + "_episodes.csv");
  const auto svg_path = join(cfg.out_dir, base + ".svg");
  harness::write_sweep_csvs(res, points_path, episodes_path);
  harness::write_sweep_svg(res, cfg.task, svg_path);
  std::cout << "wrote " << points_path << "\n"
            << "wrote " << episodes_path << "\n"
            << "wrote " << svg_path << "\n";
  return 0;
}

int run_compare(const Options& opt, const std::vector<std::string>& method_args,
                const std::vector<std::uint64_t>& seed_args, int iterations) {
  auto cfg = resolve_config(opt);
  if (!seed_args.empty()) cfg.seeds = seed_args;
  if (iterations >= 0) cfg.bo.iterations = iterations;
  std::vector<harness::Method> methods;
  for (const auto& name : method_args)
    methods.push_back(harness::method_by_name(name));
  const auto res = harness::run_comparison(cfg, methods);
  for (const auto& notice : res.notices)
    std::cerr << "notice: " << notice << "\n";
  const auto runs_path = join(cfg.out_dir, "comparison_runs.csv");
  const auto curves_path = join(cfg.out_dir, "comparison_curves.csv");
  const auto svg_path = join(cfg.out_dir, "comparison.svg");
  harness::write_comparison_csvs(res, runs_path, curves_path);
  harness::write_comparison_svg(res, cfg.task, svg_path);
  std::cout << "wrote " << runs_path << "\n"
            << "wrote " << curves_path << "\n"
            << "wrote " << svg_path << "\n";
  return 0;
}

int run_fit_noise(const Options& opt, const std::string& axis_arg, int grid,
                  int repeats, int degree) {
  const auto cfg = resolve_config(opt);
  const auto axis = harness::axis_by_name(axis_arg);
  const auto res = harness::run_grid_sweep(cfg, axis, grid, repeats, opt.seed);
  for (std::size_t j = 0; j < res.points.size(); ++j)
    if (!res.points[j].error.empty())
      std::cerr << "notice: sweep point " << j << " failed: "
                << res.points[j].error << "\n";

  std::vector<double> xs, ys;
  for (const auto& pt : res.points)
    for (double g : pt.returns) {
      xs.push_back(pt.value);
      ys.push_back(g);
    }
  if (xs.empty()) throw std::runtime_error("noise fit: no successful episodes");
  Eigen::MatrixXd inputs(xs.size(), 1);
  Eigen::VectorXd values(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    inputs(i, 0) = xs[i];
    values[i] = ys[i];
  }

  const int ax = axis == harness::SweepAxis::lambda ? 0 : 1;
  Eigen::VectorXd lo(1), hi(1);
  lo[0] = cfg.box.lower[ax];
  hi[0] = cfg.box.upper[ax];
  const auto map = noise::FeatureMap::polynomial(degree, lo, hi);
  const auto trend = noise::fit_trend(inputs, values, map);
  const auto nm = noise::fit_noise(inputs, values, trend, map);
  const auto data = harness::make_noise_plot(
      nm, trend, map, inputs.col(0), values, 200);

  const std::string name = harness::axis_name(axis);
  const auto grid_path = join(cfg.out_dir, "noise_" + name + ".csv");
  const auto samples_path =
      join(cfg.out_dir, "noise_" + name + "_samples.csv");
  const auto svg_path = join(cfg.out_dir, "noise_" + name + ".svg");
  const auto model_path = join(cfg.out_dir, "noise_model_" + name + ".json");
  harness::write_noise_csvs(data, name, grid_path, samples_path);
  harness::write_noise_svg(data, name, svg_path);

  nlohmann::json j;
  j["axis"] = name;
  j["degree"] = degree;
  j["interval"] = {lo[0], hi[0]};
  j["z"] = nm.z;
  j["zeta"] = nm.zeta;
  j["beta"] = std::vector<double>(nm.beta.data(), nm.beta.data() + nm.beta.size());
  {
    std::ofstream out(model_path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + model_path);
    out << j.dump(2) << "\n";
    if (!out.good()) throw std::ios_base::failure("cannot write " + model_path);
  }
  std::cout << "wrote " << grid_path << "\n"
            << "wrote " << samples_path << "\n"
            << "wrote " << svg_path << "\n"
            << "wrote " << model_path << "\n";
  return 0;
}

int run_bo_cmd(const Options& opt, const std::string& mode, int iterations) {
  auto cfg = resolve_config(opt);
  if (iterations >= 0) cfg.bo.iterations = iterations;
  if (!mode.empty()) {
    if (mode == "hetero")
      cfg.bo.mode = gp::NoiseMode::heteroscedastic;
    else if (mode == "homo")
      cfg.bo.mode = gp::NoiseMode::homoscedastic;
    else
      throw std::invalid_argument("unknown mode: " + mode);
  }
  cfg.bo.timing = cfg.timing;
  const auto fn = harness::make_episode_fn(cfg);
  const auto res = bo::run_bo(fn, cfg.box, cfg.bo, opt.seed);
  if (res.aborted)
    std::cerr << "notice: run aborted early: " << res.abort_reason << "\n";
  const auto trace_path = join(cfg.out_dir, "bo_trace.csv");
  const auto episodes_path = join(cfg.out_dir, "bo_trace_episodes.csv");
  harness::write_trace_csvs(res.trace, trace_path, episodes_path);
  std::cout << "wrote " << trace_path << "\n"
            << "wrote " << episodes_path << "\n"
            << "best lambda " << res.best_x[0] << " sigma_eps " << res.best_x[1]
            << " scaled value " << res.best_value << "\n";
  return res.aborted ? 4 : 0;
}

int run_cmaes_cmd(const Options& opt, int budget) {
  const auto cfg = resolve_config(opt);
  const auto fn = harness::make_episode_fn(cfg);
  const auto pilot =
      bo::run_pilot(fn, cfg.box, cfg.bo.pilot_points, cfg.bo.n_r, opt.seed);
  const Eigen::VectorXd start =
      cfg.bo.start.size() != 0 ? cfg.bo.start : cfg.box.lower;
  const int b = budget >= 0 ? budget : cfg.bo.iterations + 1;
  const auto res = cmaes::run_cmaes(fn, cfg.box, start, pilot.scaler, cfg.cma,
                                    b, cfg.bo.n_r, opt.seed, cfg.timing);
  const auto trace_path = join(cfg.out_dir, "cmaes_trace.csv");
  const auto episodes_path = join(cfg.out_dir, "cmaes_trace_episodes.csv");
  harness::write_trace_csvs(res.trace, trace_path, episodes_path);
  std::cout << "wrote " << trace_path << "\n"
            << "wrote " << episodes_path << "\n"
            << "best lambda " << res.best_x[0] << " sigma_eps " << res.best_x[1]
            << " scaled value " << res.best_value << "\n";
  return 0;
}

int run_episode_cmd(const Options& opt, double lambda, double sigma,
                    int steps) {
  const auto cfg = resolve_config(opt);
  const auto plant = env::Plant::by_name(cfg.task);
  mppi::MppiConfig mc;
  mc.lambda = std::isnan(lambda) ? cfg.optimum[0] : lambda;
  mc.sigma_eps = std::isnan(sigma) ? cfg.optimum[1] : sigma;
  mc.horizon = cfg.horizon;
  mc.rollouts = cfg.rollouts;
  rng::Engine eng(opt.seed);
  const auto res = mppi::run_episode(
      plant, mc, steps > 0 ? steps : cfg.episode_steps, eng, true);
  const auto path = join(cfg.out_dir, "episode.csv");
  harness::write_episode_csv(plant, res.trajectory, path);
  std::cout << "wrote " << path << "\n"
            << "return " << res.episode_return
            << (res.truncated ? " (truncated)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPC hyper-parameter tuning harness"};
  app.require_subcommand(1);

  Options opt;
  auto* task_opt =
      app.add_option("--task", opt.task, "built-in task preset")->
      check(CLI::IsMember({"pendulum", "cartpole", "acrobot"}));
  auto* config_opt =
      app.add_option("--config", opt.config_path, "experiment config JSON");
  task_opt->excludes(config_opt);
  config_opt->excludes(task_opt);
  app.add_option("--seed", opt.seed, "master seed for single-run subcommands");
  app.add_option("--out", opt.out_dir, "output directory (overrides config)");
  app.add_flag("--timing", opt.timing, "stamp wall times into trace CSVs");

  std::string axis = "lambda";
  int grid = 15, repeats = 10, degree = 10, iterations = -1, budget = -1;
  int steps = -1;
  std::string mode;
  double ep_lambda = std::numeric_limits<double>::quiet_NaN();
  double ep_sigma = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> methods = {"bo_hetero", "bo_homo", "cmaes"};
  std::vector<std::uint64_t> seeds;

  auto* sweep = app.add_subcommand("sweep", "grid sweep of one hyper-parameter");
  sweep->fallthrough();
  sweep->add_option("--axis", axis, "lambda or sigma_eps");
  sweep->add_option("--grid", grid, "grid size");
  sweep->add_option("--repeats", repeats, "episodes per grid point");

  auto* compare = app.add_subcommand("compare", "paired method comparison");
  compare->fallthrough();
  compare->add_option("--methods", methods, "subset of bo_hetero,bo_homo,cmaes")
      ->delimiter(',');
  compare->add_option("--seeds", seeds, "per-pair master seeds")->delimiter(',');
  compare->add_option("--iterations", iterations, "online iterations");

  auto* fit = app.add_subcommand("fit-noise", "fit and export the noise model");
  fit->fallthrough();
  fit->add_option("--axis", axis, "lambda or sigma_eps");
  fit->add_option("--grid", grid, "grid size");
  fit->add_option("--repeats", repeats, "episodes per grid point");
  fit->add_option("--degree", degree, "polynomial feature degree");

  auto* bo_cmd = app.add_subcommand("bo", "one Bayesian-optimisation run");
  bo_cmd->fallthrough();
  bo_cmd->add_option("--mode", mode, "hetero or homo");
  bo_cmd->add_option("--iterations", iterations, "online iterations");

  auto* cma_cmd = app.add_subcommand("cmaes", "one evolution-strategy run");
  cma_cmd->fallthrough();
  cma_cmd->add_option("--budget", budget, "observation budget");

  auto* ep_cmd = app.add_subcommand("episode", "single controller episode");
  ep_cmd->fallthrough();
  ep_cmd->add_option("--lambda", ep_lambda, "temperature");
  ep_cmd->add_option("--sigma", ep_sigma, "control noise std");
  ep_cmd->add_option("--steps", steps, "episode length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep->parsed()) return run_sweep(opt, axis, grid, repeats);
    if (compare->parsed()) return run_compare(opt, methods, seeds, iterations);
    if (fit->parsed()) return run_fit_noise(opt, axis, grid, repeats, degree);
    if (bo_cmd->parsed()) return run_bo_cmd(opt, mode, iterations);
    if (cma_cmd->parsed()) return run_cmaes_cmd(opt, budget);
    if (ep_cmd->parsed()) return run_episode_cmd(opt, ep_lambda, ep_sigma, steps);
    std::cerr << "error: config: no subcommand\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
