#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpctune/bayesopt.hpp"
#include "mpctune/cmaes.hpp"
#include "mpctune/env.hpp"
#include "mpctune/mppi.hpp"
#include "mpctune/noise_model.hpp"

namespace mpctune::harness {

// Controller shape, hyper-parameter search box and tuned optimum for one of
// the built-in tasks.  The optimum anchors one-dimensional sweeps: the
// non-swept coordinate is held there.
struct TaskPreset {
  std::string task;
  int horizon = 10;         // lookahead steps T
  int rollouts = 10;        // sampled trajectories M
  bo::Box box;              // (lambda, sigma_eps) intervals
  Eigen::VectorXd optimum;  // tuned (lambda, sigma_eps)
};

// Throws std::invalid_argument for an unknown task name.
TaskPreset preset_by_name(const std::string& task);

// One experiment: a task, its controller shape, the search box, and the
// optimiser settings.  Serialisable to JSON; parse -> serialise -> parse is
// the identity.
struct ExperimentConfig {
  std::string task = "pendulum";
  int horizon = 10;
  int rollouts = 10;
  int episode_steps = 200;
  bo::Box box;
  Eigen::VectorXd optimum;
  bo::BoConfig bo;
  cmaes::CmaConfig cma;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string out_dir = ".";
  bool timing = false;

  static ExperimentConfig for_task(const std::string& task);

  // Throws std::invalid_argument when intervals are degenerate or counts
  // are out of range.
  void validate() const;
};

std::string to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// Closed-loop objective: one controller episode at hyper-parameters
// x = (lambda, sigma_eps), deterministically seeded.
bo::EpisodeFn make_episode_fn(const ExperimentConfig& cfg);

enum class SweepAxis { lambda, sigma_eps };

std::string axis_name(SweepAxis axis);
SweepAxis axis_by_name(const std::string& name);

struct SweepPoint {
  double value = 0.0;           // swept coordinate
  std::vector<double> returns;  // raw per-repeat episode returns
  double mean = 0.0;
  double stddev = 0.0;          // sample std over repeats
  std::string error;            // nonempty when the point failed
};

struct SweepResult {
  SweepAxis axis = SweepAxis::lambda;
  std::vector<SweepPoint> points;
};

// Uniform grid over the swept interval, the other coordinate held at the
// task optimum, `repeats` episodes per point seeded from the sweep stream.
// A failing point records its error and the sweep continues.
SweepResult run_grid_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                           int grid_size, int repeats,
                           std::uint64_t master_seed);

// Same sweep over an injected objective instead of the task episode.
SweepResult run_grid_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                           int grid_size, int repeats,
                           std::uint64_t master_seed, const bo::EpisodeFn& fn);

enum class Method { bo_hetero, bo_homo, cmaes };

std::string method_name(Method m);
Method method_by_name(const std::string& name);

struct MethodRun {
  Method method = Method::bo_hetero;
  std::uint64_t seed = 0;
  std::vector<bo::ObservationRecord> trace;
  std::vector<double> best_so_far;  // running max of the scaled observations
  std::string error;                // nonempty -> excluded from aggregation
};

struct MethodCurve {
  Method method = Method::bo_hetero;
  int runs_aggregated = 0;
  std::vector<double> mean;    // per iteration over seeds
  std::vector<double> twostd;  // two sample standard deviations
};

struct ComparisonResult {
  std::vector<MethodRun> runs;
  std::vector<MethodCurve> curves;
  std::vector<std::string> notices;  // one per excluded run
};

// Paired comparison: every method starts from the same predefined point and
// shares, per seed, one pilot design and reward scaler, so method pairs see
// identical episode streams.
ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<Method>& methods);

// Same comparison over an injected objective instead of the task episode.
ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<Method>& methods,
                                const bo::EpisodeFn& fn);

struct NoisePlotData {
  Eigen::VectorXd grid;      // swept coordinate
  Eigen::VectorXd ghat;      // trend prediction on the grid
  Eigen::VectorXd sigma;     // fitted noise std on the grid
  Eigen::VectorXd sample_x;  // raw sample overlay, may be empty
  Eigen::VectorXd sample_y;
};

// Grid evaluation of the fitted trend and noise band over a one-dimensional
// feature-map domain.
NoisePlotData make_noise_plot(const noise::NoiseModel& nm,
                              const noise::TrendModel& trend,
                              const noise::FeatureMap& map,
                              const Eigen::VectorXd& sample_x,
                              const Eigen::VectorXd& sample_y, int grid_size);

// CSV/SVG artifact writers.  All numbers are printed with %.17g so rereads
// round-trip exactly, rows end in '\n', and identical inputs produce
// byte-identical files.
void write_sweep_csvs(const SweepResult& res, const std::string& points_path,
                      const std::string& episodes_path);
void write_sweep_svg(const SweepResult& res, const std::string& task,
                     const std::string& path);
void write_trace_csvs(const std::vector<bo::ObservationRecord>& trace,
                      const std::string& trace_path,
                      const std::string& episodes_path);
void write_comparison_csvs(const ComparisonResult& res,
                           const std::string& runs_path,
                           const std::string& curves_path);
void write_comparison_svg(const ComparisonResult& res, const std::string& task,
                          const std::string& path);
void write_noise_csvs(const NoisePlotData& data, const std::string& axis,
                      const std::string& grid_path,
                      const std::string& samples_path);
void write_noise_svg(const NoisePlotData& data, const std::string& axis,
                     const std::string& path);
void write_episode_csv(const env::Plant& plant,
                       const std::vector<mppi::TraceRow>& rows,
                       const std::string& path);

}  // namespace mpctune::harness
