#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "mpctune/env.hpp"
#include "mpctune/mppi.hpp"

using namespace mpctune;
using mppi::MppiConfig;

TEST_CASE("weights form a probability vector for random inputs") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  MppiConfig cfg;
  cfg.lambda = 0.7;
  cfg.sigma_eps = 1.3;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd costs(8), coupling(8);
    for (int j = 0; j < 8; ++j) {
      costs[j] = u(eng);
      coupling[j] = u(eng) - 50.0;
    }
    const auto wr = mppi::compute_weights(costs, coupling, cfg);
    CHECK(!wr.degenerate);
    CHECK(wr.weights.minCoeff() >= 0.0);
    CHECK(wr.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("identical rollouts get exactly uniform weights") {
  MppiConfig cfg;
  cfg.lambda = 0.01;
  cfg.sigma_eps = 0.5;
  const Eigen::VectorXd costs = Eigen::VectorXd::Constant(4, 123.456);
  const Eigen::VectorXd coupling = Eigen::VectorXd::Constant(4, -9.9);
  const auto wr = mppi::compute_weights(costs, coupling, cfg);
  for (int j = 0; j < 4; ++j) CHECK(wr.weights[j] == 0.25);
}

TEST_CASE("temperature interpolates between argmin and uniform") {
  Eigen::VectorXd costs(3);
  costs << 1.0, 2.0, 3.0;
  const Eigen::VectorXd coupling = Eigen::VectorXd::Zero(3);
  {
    MppiConfig cfg;
    cfg.lambda = 1e-6;
    cfg.sigma_eps = 1.0;
    const auto wr = mppi::compute_weights(costs, coupling, cfg);
    CHECK(wr.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    MppiConfig cfg;
    cfg.lambda = 1e6;
    cfg.sigma_eps = 1.0;
    const auto wr = mppi::compute_weights(costs, coupling, cfg);
    for (int j = 0; j < 3; ++j)
      CHECK(wr.weights[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
  }
}

TEST_CASE("huge cost spreads stay finite through the min-shift") {
  MppiConfig cfg;
  cfg.lambda = 1e-10;
  cfg.sigma_eps = 1.0;
  Eigen::VectorXd costs(3);
  costs << 1e8, 2e8, 0.5e8;
  const auto wr =
      mppi::compute_weights(costs, Eigen::VectorXd::Zero(3), cfg);
  CHECK(!wr.degenerate);
  CHECK(wr.weights.allFinite());
  CHECK(wr.weights.sum() == doctest::Approx(1.0));
  CHECK(wr.weights[2] == doctest::Approx(1.0));
}

TEST_CASE("adding a constant to every cost leaves weights unchanged") {
  MppiConfig cfg;
  cfg.lambda = 0.3;
  cfg.sigma_eps = 2.0;
  Eigen::VectorXd costs(4);
  costs << 5.0, 9.0, 7.5, 6.25;
  Eigen::VectorXd coupling(4);
  coupling << 1.0, -2.0, 0.5, 0.0;
  const auto a = mppi::compute_weights(costs, coupling, cfg);
  const auto b = mppi::compute_weights(
      (costs.array() + 1000.0).matrix(), coupling, cfg);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero perturbation std drops the coupling term") {
  MppiConfig cfg;
  cfg.lambda = 0.5;
  cfg.sigma_eps = 0.0;
  Eigen::VectorXd costs(3);
  costs << 4.0, 2.0, 8.0;
  Eigen::VectorXd coupling(3);
  coupling << 1e9, -1e9, 3.0;
  const auto with = mppi::compute_weights(costs, coupling, cfg);
  const auto without =
      mppi::compute_weights(costs, Eigen::VectorXd::Zero(3), cfg);
  CHECK(!with.degenerate);
  CHECK((with.weights - without.weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("non-finite costs fall back to flagged uniform weights") {
  MppiConfig cfg;
  Eigen::VectorXd costs(3);
  costs << 1.0, std::numeric_limits<double>::infinity(), 2.0;
  const auto wr =
      mppi::compute_weights(costs, Eigen::VectorXd::Zero(3), cfg);
  CHECK(wr.degenerate);
  for (int j = 0; j < 3; ++j)
    CHECK(wr.weights[j] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("action update is the weighted perturbation average") {
  Eigen::VectorXd actions(2);
  actions << 1.0, 2.0;
  Eigen::VectorXd w(2);
  w << 0.25, 0.75;
  Eigen::MatrixXd eps(2, 2);
  eps << 0.4, -0.8, -0.4, 0.8;
  const Eigen::VectorXd next = mppi::update_actions(actions, w, eps);
  CHECK(next[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(2.4).epsilon(1e-15));
}

TEST_CASE("rollout cost accumulates the shifted reward") {
  const auto p = env::Plant::pendulum();
  const env::State s0 = (env::State(2) << M_PI, 0.0).finished();
  Eigen::VectorXd controls(3);
  controls << 0.5, -0.2, 0.1;
  double want = 0.0;
  env::State s = s0;
  for (int i = 0; i < 3; ++i) {
    s = env::step(p, s, controls[i]);
    want += env::reward_upper_bound(p) - env::reward(p, s, controls[i]);
  }
  CHECK(mppi::rollout_cost(p, s0, controls) ==
        doctest::Approx(want).epsilon(1e-12));
  CHECK(mppi::rollout_cost(p, s0, controls) >= 0.0);
}

TEST_CASE("rollout costs are nonnegative for random plans") {
  std::mt19937_64 eng(5);
  for (const auto& p :
       {env::Plant::pendulum(), env::Plant::cartpole(), env::Plant::acrobot()}) {
    std::uniform_real_distribution<double> u(p.action_min, p.action_max);
    std::uniform_real_distribution<double> us(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      env::State s(p.state_dim);
      for (int k = 0; k < p.state_dim; ++k) s[k] = us(eng);
      Eigen::VectorXd controls(6);
      for (int i = 0; i < 6; ++i) controls[i] = u(eng);
      CHECK(mppi::rollout_cost(p, s, controls) >= 0.0);
    }
  }
}

TEST_CASE("controller shifts its plan and zero-fills the tail") {
  MppiConfig cfg;
  cfg.horizon = 5;
  cfg.rollouts = 4;
  cfg.lambda = 0.5;
  cfg.sigma_eps = 0.8;
  mppi::Controller ctrl(cfg);
  const auto p = env::Plant::pendulum();
  rng::Engine eng(42);
  const env::State s = (env::State(2) << M_PI, 0.0).finished();
  ctrl.step(p, s, eng);
  CHECK(ctrl.plan()[cfg.horizon - 1] == 0.0);
}

TEST_CASE("episodes are reproducible from the engine seed") {
  MppiConfig cfg;
  cfg.lambda = 0.694;
  cfg.sigma_eps = 1.579;
  cfg.horizon = 10;
  cfg.rollouts = 10;
  const auto p = env::Plant::pendulum();
  rng::Engine a(99), b(99), c(100);
  const auto ra = mppi::run_episode(p, cfg, 40, a, true);
  const auto rb = mppi::run_episode(p, cfg, 40, b, true);
  const auto rc = mppi::run_episode(p, cfg, 40, c, true);
  CHECK(ra.episode_return == rb.episode_return);
  REQUIRE(ra.trajectory.size() == rb.trajectory.size());
  for (size_t i = 0; i < ra.trajectory.size(); ++i)
    CHECK(ra.trajectory[i].action == rb.trajectory[i].action);
  CHECK(ra.episode_return != rc.episode_return);
}

TEST_CASE("episode return equals the sum of trace rewards") {
  MppiConfig cfg;
  cfg.lambda = 0.694;
  cfg.sigma_eps = 1.579;
  cfg.horizon = 10;
  cfg.rollouts = 10;
  const auto p = env::Plant::pendulum();
  rng::Engine eng(7);
  const auto r = mppi::run_episode(p, cfg, 60, eng, true);
  double total = 0.0;
  for (const auto& row : r.trajectory) total += row.reward;
  CHECK(r.episode_return == doctest::Approx(total).epsilon(1e-12));
  CHECK(r.trajectory.front().time == doctest::Approx(p.dt));
  CHECK(r.trajectory.back().time == doctest::Approx(60 * p.dt));
}
