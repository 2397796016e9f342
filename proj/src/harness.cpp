#include "mpctune/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mpctune/rng.hpp"
#include "mpctune/svg.hpp"

namespace mpctune::harness {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Minimal CSV quoting: only fields with commas, quotes or newlines are
// wrapped.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::ios_base::failure("cannot write " + path);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

std::vector<std::string> state_columns(const env::Plant& plant) {
  switch (plant.kind) {
    case env::PlantKind::pendulum:
      return {"theta", "theta_dot"};
    case env::PlantKind::cartpole:
      return {"x", "x_dot", "theta", "theta_dot"};
    case env::PlantKind::acrobot:
      return {"q1", "q2", "q1_dot", "q2_dot"};
  }
  return {};
}

std::string method_colour(Method m) {
  switch (m) {
    case Method::bo_hetero:
      return "#1f6fb2";
    case Method::bo_homo:
      return "#d1495b";
    case Method::cmaes:
      return "#3a7d44";
  }
  return "#333333";
}

std::vector<std::string> x_columns(int dim) {
  if (dim == 2) return {"lambda", "sigma_eps"};
  std::vector<std::string> cols;
  for (int i = 0; i < dim; ++i) cols.push_back("x" + std::to_string(i));
  return cols;
}

}  // namespace

TaskPreset preset_by_name(const std::string& task) {
  TaskPreset p;
  p.task = task;
  p.box.lower = Eigen::Vector2d(1e-10, 1e-10);
  if (task == "pendulum") {
    p.horizon = 10;
    p.rollouts = 10;
    p.box.upper = Eigen::Vector2d(1.2, 3.0);
    p.optimum = Eigen::Vector2d(0.694, 1.579);
  } else if (task == "cartpole") {
    p.horizon = 10;
    p.rollouts = 100;
    p.box.upper = Eigen::Vector2d(1.2, 3.0);
    p.optimum = Eigen::Vector2d(0.757, 0.158);
  } else if (task == "acrobot") {
    p.horizon = 8;
    p.rollouts = 30;
    p.box.upper = Eigen::Vector2d(1.2, 10.0);
    p.optimum = Eigen::Vector2d(0.063, 8.421);
  } else {
    throw std::invalid_argument("unknown task: " + task);
  }
  return p;
}

ExperimentConfig ExperimentConfig::for_task(const std::string& task) {
  const TaskPreset p = preset_by_name(task);
  ExperimentConfig cfg;
  cfg.task = p.task;
  cfg.horizon = p.horizon;
  cfg.rollouts = p.rollouts;
  cfg.episode_steps = env::Plant::by_name(task).episode_steps;
  cfg.box = p.box;
  cfg.optimum = p.optimum;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (box.dim() != 2 || optimum.size() != 2)
    throw std::invalid_argument("config: search box must be (lambda, sigma_eps)");
  for (int i = 0; i < 2; ++i)
    if (!(box.lower[i] < box.upper[i]))
      throw std::invalid_argument("config: degenerate search interval");
  if (!box.contains(optimum))
    throw std::invalid_argument("config: optimum outside the search box");
  if (horizon < 1 || rollouts < 1 || episode_steps < 1)
    throw std::invalid_argument("config: controller dimensions must be positive");
  if (bo.iterations < 0 || bo.n_r < 1 || bo.pilot_points < 1)
    throw std::invalid_argument("config: optimiser budgets must be positive");
  if (bo.start.size() != 0 &&
      (bo.start.size() != 2 || !box.contains(bo.start)))
    throw std::invalid_argument("config: start point outside the search box");
  if (cma.popsize < 2 || !(cma.sigma0 > 0.0))
    throw std::invalid_argument("config: invalid evolution-strategy settings");
  if (seeds.empty()) throw std::invalid_argument("config: seed list is empty");
}

std::string to_json(const ExperimentConfig& cfg) {
  json j;
  j["task"] = cfg.task;
  j["horizon"] = cfg.horizon;
  j["rollouts"] = cfg.rollouts;
  j["episode_steps"] = cfg.episode_steps;
  j["box"] = {{"lower", vec_to_json(cfg.box.lower)},
              {"upper", vec_to_json(cfg.box.upper)}};
  j["optimum"] = vec_to_json(cfg.optimum);
  json b;
  b["iterations"] = cfg.bo.iterations;
  b["n_r"] = cfg.bo.n_r;
  b["kappa"] = cfg.bo.kappa;
  b["pilot_points"] = cfg.bo.pilot_points;
  b["prior_mean"] = cfg.bo.prior_mean;
  b["mode"] =
      cfg.bo.mode == gp::NoiseMode::heteroscedastic ? "hetero" : "homo";
  b["feature"] = cfg.bo.feature_kind == noise::FeatureKind::polynomial
                     ? "polynomial"
                     : "kernel";
  b["poly_degree"] = cfg.bo.poly_degree;
  b["kernel_features"] = cfg.bo.kernel_features;
  b["kernel_shape"] = cfg.bo.kernel_shape;
  b["kernel_lengthscale"] = cfg.bo.kernel_lengthscale;
  b["acq_starts"] = cfg.bo.acq_starts;
  b["acq_evals"] = cfg.bo.acq_evals;
  b["fit"] = {{"starts", cfg.bo.fit.starts},
              {"max_evals", cfg.bo.fit.max_evals},
              {"decades", cfg.bo.fit.decades}};
  b["start"] = vec_to_json(cfg.bo.start);
  j["bo"] = b;
  j["cma"] = {{"sigma0", cfg.cma.sigma0}, {"popsize", cfg.cma.popsize}};
  j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  j["timing"] = cfg.timing;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg =
      ExperimentConfig::for_task(j.value("task", std::string("pendulum")));
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.rollouts = j.value("rollouts", cfg.rollouts);
  cfg.episode_steps = j.value("episode_steps", cfg.episode_steps);
  if (j.contains("box")) {
    cfg.box.lower = vec_from_json(j.at("box").at("lower"));
    cfg.box.upper = vec_from_json(j.at("box").at("upper"));
  }
  if (j.contains("optimum")) cfg.optimum = vec_from_json(j.at("optimum"));
  if (j.contains("bo")) {
    const json& b = j.at("bo");
    cfg.bo.iterations = b.value("iterations", cfg.bo.iterations);
    cfg.bo.n_r = b.value("n_r", cfg.bo.n_r);
    cfg.bo.kappa = b.value("kappa", cfg.bo.kappa);
    cfg.bo.pilot_points = b.value("pilot_points", cfg.bo.pilot_points);
    cfg.bo.prior_mean = b.value("prior_mean", cfg.bo.prior_mean);
    if (b.contains("mode")) {
      const std::string mode = b.at("mode").get<std::string>();
      if (mode == "hetero")
        cfg.bo.mode = gp::NoiseMode::heteroscedastic;
      else if (mode == "homo")
        cfg.bo.mode = gp::NoiseMode::homoscedastic;
      else
        throw std::invalid_argument("config: unknown mode " + mode);
    }
    if (b.contains("feature")) {
      const std::string f = b.at("feature").get<std::string>();
      if (f == "polynomial")
        cfg.bo.feature_kind = noise::FeatureKind::polynomial;
      else if (f == "kernel")
        cfg.bo.feature_kind = noise::FeatureKind::kernel;
      else
        throw std::invalid_argument("config: unknown feature kind " + f);
    }
    cfg.bo.poly_degree = b.value("poly_degree", cfg.bo.poly_degree);
    cfg.bo.kernel_features = b.value("kernel_features", cfg.bo.kernel_features);
    cfg.bo.kernel_shape = b.value("kernel_shape", cfg.bo.kernel_shape);
    cfg.bo.kernel_lengthscale =
        b.value("kernel_lengthscale", cfg.bo.kernel_lengthscale);
    cfg.bo.acq_starts = b.value("acq_starts", cfg.bo.acq_starts);
    cfg.bo.acq_evals = b.value("acq_evals", cfg.bo.acq_evals);
    if (b.contains("fit")) {
      const json& f = b.at("fit");
      cfg.bo.fit.starts = f.value("starts", cfg.bo.fit.starts);
      cfg.bo.fit.max_evals = f.value("max_evals", cfg.bo.fit.max_evals);
      cfg.bo.fit.decades = f.value("decades", cfg.bo.fit.decades);
    }
    if (b.contains("start")) cfg.bo.start = vec_from_json(b.at("start"));
  }
  if (j.contains("cma")) {
    cfg.cma.sigma0 = j.at("cma").value("sigma0", cfg.cma.sigma0);
    cfg.cma.popsize = j.at("cma").value("popsize", cfg.cma.popsize);
  }
  if (j.contains("seeds"))
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.timing = j.value("timing", cfg.timing);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  auto out = open_out(path);
  out << to_json(cfg);
  finish_out(out, path);
}

bo::EpisodeFn make_episode_fn(const ExperimentConfig& cfg) {
  const env::Plant plant = env::Plant::by_name(cfg.task);
  const int steps = cfg.episode_steps;
  const int horizon = cfg.horizon;
  const int rollouts = cfg.rollouts;
  return [plant, steps, horizon, rollouts](const Eigen::VectorXd& x,
                                           std::uint64_t seed) {
    mppi::MppiConfig mc;
    mc.lambda = x[0];
    mc.sigma_eps = x[1];
    mc.horizon = horizon;
    mc.rollouts = rollouts;
    rng::Engine eng(seed);
    return mppi::run_episode(plant, mc, steps, eng).episode_return;
  };
}

std::string axis_name(SweepAxis axis) {
  return axis == SweepAxis::lambda ? "lambda" : "sigma_eps";
}

SweepAxis axis_by_name(const std::string& name) {
  if (name == "lambda") return SweepAxis::lambda;
  if (name == "sigma_eps" || name == "sigma") return SweepAxis::sigma_eps;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

SweepResult run_grid_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                           int grid_size, int repeats,
                           std::uint64_t master_seed) {
  return run_grid_sweep(cfg, axis, grid_size, repeats, master_seed,
                        make_episode_fn(cfg));
}

SweepResult run_grid_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                           int grid_size, int repeats,
                           std::uint64_t master_seed,
                           const bo::EpisodeFn& fn) {
  cfg.validate();
  if (grid_size < 1 || repeats < 1)
    throw std::invalid_argument("sweep: grid size and repeats must be positive");
  const int ax = axis == SweepAxis::lambda ? 0 : 1;
  const double lo = cfg.box.lower[ax];
  const double hi = cfg.box.upper[ax];

  SweepResult out;
  out.axis = axis;
  for (int j = 0; j < grid_size; ++j) {
    SweepPoint pt;
    pt.value = grid_size == 1
                   ? lo
                   : lo + (hi - lo) * j / static_cast<double>(grid_size - 1);
    Eigen::VectorXd x = cfg.optimum;
    x[ax] = pt.value;
    try {
      for (int r = 0; r < repeats; ++r)
        pt.returns.push_back(
            fn(x, rng::derive(master_seed,
                              {rng::sweep_stream, static_cast<std::uint64_t>(j),
                               static_cast<std::uint64_t>(r)})));
      pt.mean = mean_of(pt.returns);
      pt.stddev = sample_std(pt.returns);
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::bo_hetero:
      return "bo_hetero";
    case Method::bo_homo:
      return "bo_homo";
    case Method::cmaes:
      return "cmaes";
  }
  return "unknown";
}

Method method_by_name(const std::string& name) {
  if (name == "bo_hetero") return Method::bo_hetero;
  if (name == "bo_homo") return Method::bo_homo;
  if (name == "cmaes") return Method::cmaes;
  throw std::invalid_argument("unknown method: " + name);
}

ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<Method>& methods) {
  return run_comparison(cfg, methods, make_episode_fn(cfg));
}

ComparisonResult run_comparison(const ExperimentConfig& cfg,
                                const std::vector<Method>& methods,
                                const bo::EpisodeFn& fn) {
  cfg.validate();
  if (methods.empty())
    throw std::invalid_argument("comparison: need at least one method");
  const Eigen::VectorXd start =
      cfg.bo.start.size() != 0 ? cfg.bo.start : cfg.box.lower;
  const int len = cfg.bo.iterations + 1;

  ComparisonResult out;
  for (const std::uint64_t seed : cfg.seeds) {
    const bo::PilotResult pilot =
        bo::run_pilot(fn, cfg.box, cfg.bo.pilot_points, cfg.bo.n_r, seed);
    for (const Method m : methods) {
      MethodRun run;
      run.method = m;
      run.seed = seed;
      try {
        if (m == Method::cmaes) {
          const auto res =
              cmaes::run_cmaes(fn, cfg.box, start, pilot.scaler, cfg.cma, len,
                               cfg.bo.n_r, seed, cfg.timing);
          run.trace = res.trace;
        } else {
          bo::BoConfig bc = cfg.bo;
          bc.mode = m == Method::bo_hetero ? gp::NoiseMode::heteroscedastic
                                           : gp::NoiseMode::homoscedastic;
          bc.start = start;
          bc.timing = cfg.timing;
          const auto res = bo::run_bo(fn, cfg.box, bc, seed, &pilot);
          run.trace = res.trace;
          if (res.aborted) run.error = "aborted: " + res.abort_reason;
        }
      } catch (const std::exception& e) {
        run.error = e.what();
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& rec : run.trace) {
        best = std::max(best, rec.y);
        run.best_so_far.push_back(best);
      }
      out.runs.push_back(std::move(run));
    }
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    MethodCurve curve;
    curve.method = methods[mi];
    std::vector<const MethodRun*> ok;
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
      const MethodRun& run = out.runs[si * methods.size() + mi];
      if (run.error.empty() && static_cast<int>(run.trace.size()) == len)
        ok.push_back(&run);
      else
        out.notices.push_back(
            "excluded " + method_name(run.method) + " seed " +
            std::to_string(run.seed) + ": " +
            (run.error.empty() ? "incomplete trace" : run.error));
    }
    curve.runs_aggregated = static_cast<int>(ok.size());
    for (int t = 0; t < len && !ok.empty(); ++t) {
      std::vector<double> vals;
      for (const MethodRun* run : ok) vals.push_back(run->best_so_far[t]);
      curve.mean.push_back(mean_of(vals));
      curve.twostd.push_back(2.0 * sample_std(vals));
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

NoisePlotData make_noise_plot(const noise::NoiseModel& nm,
                              const noise::TrendModel& trend,
                              const noise::FeatureMap& map,
                              const Eigen::VectorXd& sample_x,
                              const Eigen::VectorXd& sample_y, int grid_size) {
  if (map.lower().size() != 1)
    throw std::invalid_argument("noise plot: one-dimensional domains only");
  if (sample_x.size() != sample_y.size())
    throw std::invalid_argument("noise plot: sample vectors differ in length");
  if (grid_size < 2)
    throw std::invalid_argument("noise plot: grid needs at least two points");

  NoisePlotData data;
  data.grid.resize(grid_size);
  data.ghat.resize(grid_size);
  data.sigma.resize(grid_size);
  const double lo = map.lower()[0];
  const double hi = map.upper()[0];
  Eigen::VectorXd x(1);
  for (int i = 0; i < grid_size; ++i) {
    data.grid[i] = lo + (hi - lo) * i / static_cast<double>(grid_size - 1);
    x[0] = data.grid[i];
    data.ghat[i] = trend.predict(map, x);
    data.sigma[i] = nm.std(map, x);
  }
  data.sample_x = sample_x;
  data.sample_y = sample_y;
  return data;
}

void write_sweep_csvs(const SweepResult& res, const std::string& points_path,
                      const std::string& episodes_path) {
  const std::string axis = axis_name(res.axis);
  auto pts = open_out(points_path);
  pts << "point," << axis << ",mean,std,repeats,error\n";
  for (std::size_t j = 0; j < res.points.size(); ++j) {
    const SweepPoint& pt = res.points[j];
    pts << j << ',' << num(pt.value) << ',' << num(pt.mean) << ','
        << num(pt.stddev) << ',' << pt.returns.size() << ','
        << csv_field(pt.error) << '\n';
  }
  finish_out(pts, points_path);

  auto eps = open_out(episodes_path);
  eps << "point," << axis << ",repeat,return\n";
  for (std::size_t j = 0; j < res.points.size(); ++j)
    for (std::size_t r = 0; r < res.points[j].returns.size(); ++r)
      eps << j << ',' << num(res.points[j].value) << ',' << r << ','
          << num(res.points[j].returns[r]) << '\n';
  finish_out(eps, episodes_path);
}

void write_sweep_svg(const SweepResult& res, const std::string& task,
                     const std::string& path) {
  svg::Figure fig;
  fig.title = task + " " + axis_name(res.axis) + " sweep";
  fig.xlabel = axis_name(res.axis);
  fig.ylabel = "episode return";
  svg::Band band;
  svg::Series line;
  line.label = "mean over repeats";
  svg::Marks dots;
  dots.label = "episodes";
  for (const SweepPoint& pt : res.points) {
    if (!pt.error.empty()) continue;
    band.x.push_back(pt.value);
    band.lo.push_back(pt.mean - 2.0 * pt.stddev);
    band.hi.push_back(pt.mean + 2.0 * pt.stddev);
    line.x.push_back(pt.value);
    line.y.push_back(pt.mean);
    for (double g : pt.returns) {
      dots.x.push_back(pt.value);
      dots.y.push_back(g);
    }
  }
  fig.bands.push_back(std::move(band));
  fig.series.push_back(std::move(line));
  fig.marks.push_back(std::move(dots));
  auto out = open_out(path);
  out << fig.render();
  finish_out(out, path);
}

void write_trace_csvs(const std::vector<bo::ObservationRecord>& trace,
                      const std::string& trace_path,
                      const std::string& episodes_path) {
  const int dim = trace.empty() ? 2 : static_cast<int>(trace.front().x.size());
  const auto cols = x_columns(dim);
  auto out = open_out(trace_path);
  out << "iteration";
  for (const auto& c : cols) out << ',' << c;
  out << ",y,post_mean,post_sd,wall_time_s\n";
  for (const auto& rec : trace) {
    out << rec.iteration;
    for (int i = 0; i < dim; ++i) out << ',' << num(rec.x[i]);
    out << ',' << num(rec.y) << ',' << num(rec.post_mean) << ','
        << num(rec.post_sd) << ',' << num(rec.wall_time_s) << '\n';
  }
  finish_out(out, trace_path);

  auto eps = open_out(episodes_path);
  eps << "iteration,repeat,return\n";
  for (const auto& rec : trace)
    for (std::size_t r = 0; r < rec.episode_returns.size(); ++r)
      eps << rec.iteration << ',' << r << ',' << num(rec.episode_returns[r])
          << '\n';
  finish_out(eps, episodes_path);
}

void write_comparison_csvs(const ComparisonResult& res,
                           const std::string& runs_path,
                           const std::string& curves_path) {
  int dim = 2;
  for (const auto& run : res.runs)
    if (!run.trace.empty()) {
      dim = static_cast<int>(run.trace.front().x.size());
      break;
    }
  const auto cols = x_columns(dim);
  auto runs = open_out(runs_path);
  runs << "method,seed,iteration";
  for (const auto& c : cols) runs << ',' << c;
  runs << ",y,best_so_far,post_mean,post_sd,wall_time_s\n";
  for (const auto& run : res.runs)
    for (std::size_t t = 0; t < run.trace.size(); ++t) {
      const auto& rec = run.trace[t];
      runs << method_name(run.method) << ',' << run.seed << ','
           << rec.iteration;
      for (int i = 0; i < dim; ++i) runs << ',' << num(rec.x[i]);
      runs << ',' << num(rec.y) << ',' << num(run.best_so_far[t]) << ','
           << num(rec.post_mean) << ',' << num(rec.post_sd) << ','
           << num(rec.wall_time_s) << '\n';
    }
  finish_out(runs, runs_path);

  auto curves = open_out(curves_path);
  curves << "method,iteration,mean,twostd,runs\n";
  for (const auto& curve : res.curves)
    for (std::size_t t = 0; t < curve.mean.size(); ++t)
      curves << method_name(curve.method) << ',' << t << ','
             << num(curve.mean[t]) << ',' << num(curve.twostd[t]) << ','
             << curve.runs_aggregated << '\n';
  finish_out(curves, curves_path);
}

void write_comparison_svg(const ComparisonResult& res, const std::string& task,
                          const std::string& path) {
  svg::Figure fig;
  fig.title = task + " method comparison";
  fig.xlabel = "iteration";
  fig.ylabel = "best observed scaled return";
  for (const auto& curve : res.curves) {
    if (curve.mean.empty()) continue;
    svg::Band band;
    band.colour = method_colour(curve.method);
    svg::Series line;
    line.colour = band.colour;
    line.label = method_name(curve.method);
    for (std::size_t t = 0; t < curve.mean.size(); ++t) {
      band.x.push_back(static_cast<double>(t));
      band.lo.push_back(curve.mean[t] - curve.twostd[t]);
      band.hi.push_back(curve.mean[t] + curve.twostd[t]);
      line.x.push_back(static_cast<double>(t));
      line.y.push_back(curve.mean[t]);
    }
    fig.bands.push_back(std::move(band));
    fig.series.push_back(std::move(line));
  }
  auto out = open_out(path);
  out << fig.render();
  finish_out(out, path);
}

void write_noise_csvs(const NoisePlotData& data, const std::string& axis,
                      const std::string& grid_path,
                      const std::string& samples_path) {
  auto grid = open_out(grid_path);
  grid << axis << ",ghat,lo,hi,sigma\n";
  for (int i = 0; i < data.grid.size(); ++i)
    grid << num(data.grid[i]) << ',' << num(data.ghat[i]) << ','
         << num(data.ghat[i] - 2.0 * data.sigma[i]) << ','
         << num(data.ghat[i] + 2.0 * data.sigma[i]) << ','
         << num(data.sigma[i]) << '\n';
  finish_out(grid, grid_path);

  auto samples = open_out(samples_path);
  samples << axis << ",return\n";
  for (int i = 0; i < data.sample_x.size(); ++i)
    samples << num(data.sample_x[i]) << ',' << num(data.sample_y[i]) << '\n';
  finish_out(samples, samples_path);
}

void write_noise_svg(const NoisePlotData& data, const std::string& axis,
                     const std::string& path) {
  svg::Figure fig;
  fig.title = "fitted noise model";
  fig.xlabel = axis;
  fig.ylabel = "episode return";
  svg::Band band;
  svg::Series line;
  line.label = "trend";
  svg::Marks dots;
  dots.label = "samples";
  for (int i = 0; i < data.grid.size(); ++i) {
    band.x.push_back(data.grid[i]);
    band.lo.push_back(data.ghat[i] - 2.0 * data.sigma[i]);
    band.hi.push_back(data.ghat[i] + 2.0 * data.sigma[i]);
    line.x.push_back(data.grid[i]);
    line.y.push_back(data.ghat[i]);
  }
  for (int i = 0; i < data.sample_x.size(); ++i) {
    dots.x.push_back(data.sample_x[i]);
    dots.y.push_back(data.sample_y[i]);
  }
  fig.bands.push_back(std::move(band));
  fig.series.push_back(std::move(line));
  fig.marks.push_back(std::move(dots));
  auto out = open_out(path);
  out << fig.render();
  finish_out(out, path);
}

void write_episode_csv(const env::Plant& plant,
                       const std::vector<mppi::TraceRow>& rows,
                       const std::string& path) {
  const auto cols = state_columns(plant);
  auto out = open_out(path);
  out << "time";
  for (const auto& c : cols) out << ',' << c;
  out << ",action,reward\n";
  for (const auto& row : rows) {
    out << num(row.time);
    for (int i = 0; i < row.state.size(); ++i) out << ',' << num(row.state[i]);
    out << ',' << num(row.action) << ',' << num(row.reward) << '\n';
  }
  finish_out(out, path);
}

}  // namespace mpctune::harness
