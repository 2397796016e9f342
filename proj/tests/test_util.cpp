#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <set>

#include "mpctune/opt.hpp"
#include "mpctune/rng.hpp"
#include "mpctune/sobol.hpp"

using namespace mpctune;

TEST_CASE("stream derivation is deterministic and collision-free in practice") {
  const auto a = rng::derive(42, {1, 2, 3});
  const auto b = rng::derive(42, {1, 2, 3});
  CHECK(a == b);
  std::set<std::uint64_t> seen;
  for (std::uint64_t phase = 0; phase < 8; ++phase)
    for (std::uint64_t i = 0; i < 64; ++i)
      seen.insert(rng::derive(42, {phase, i}));
  CHECK(seen.size() == 8 * 64);
  CHECK(rng::derive(42, {1, 2}) != rng::derive(43, {1, 2}));
  CHECK(rng::derive(42, {1, 2}) != rng::derive(42, {2, 1}));
}

TEST_CASE("two-dimensional quasirandom sequence matches the classic points") {
  Sobol sob(2);
  const double want[7][2] = {{0.5, 0.5},     {0.75, 0.25}, {0.25, 0.75},
                             {0.375, 0.375}, {0.875, 0.875}, {0.625, 0.125},
                             {0.125, 0.625}};
  for (auto& row : want) {
    const Eigen::VectorXd p = sob.next();
    CHECK(p[0] == doctest::Approx(row[0]).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(row[1]).epsilon(1e-15));
  }
}

TEST_CASE("quasirandom points fill the unit square evenly") {
  Sobol sob(2);
  int quadrant[4] = {0, 0, 0, 0};
  for (int i = 0; i < 64; ++i) {
    const Eigen::VectorXd p = sob.next();
    CHECK(p[0] >= 0.0);
    CHECK(p[0] < 1.0);
    const int q = (p[0] >= 0.5 ? 1 : 0) + (p[1] >= 0.5 ? 2 : 0);
    ++quadrant[q];
  }
  for (int q = 0; q < 4; ++q) CHECK(quadrant[q] == 16);
}

TEST_CASE("simplex search maximises a concave quadratic inside the box") {
  const Eigen::Vector2d lo(0.0, 0.0), hi(1.0, 1.0);
  auto f = [](const Eigen::VectorXd& x) {
    return -(x[0] - 0.37) * (x[0] - 0.37) - 2.0 * (x[1] - 0.81) * (x[1] - 0.81);
  };
  const auto r = opt::nelder_mead_max(f, Eigen::Vector2d(0.9, 0.1), lo, hi, 400);
  CHECK(std::abs(r.x[0] - 0.37) < 1e-5);
  CHECK(std::abs(r.x[1] - 0.81) < 1e-5);
}

TEST_CASE("simplex search clamps to the box when the peak lies outside") {
  const Eigen::Vector2d lo(0.0, 0.0), hi(1.0, 1.0);
  auto f = [](const Eigen::VectorXd& x) { return x[0] + 0.5 * x[1]; };
  const auto r = opt::nelder_mead_max(f, Eigen::Vector2d(0.2, 0.2), lo, hi, 400);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x.maxCoeff() <= 1.0);
  CHECK(r.x.minCoeff() >= 0.0);
}

TEST_CASE("simplex search never returns less than the start value") {
  const Eigen::Vector2d lo(-1.0, -1.0), hi(1.0, 1.0);
  auto f = [](const Eigen::VectorXd& x) {
    // Spiky, multimodal, hostile to a local method.
    return std::sin(25.0 * x[0]) * std::cos(25.0 * x[1]);
  };
  const Eigen::Vector2d x0(0.3, -0.2);
  const auto r = opt::nelder_mead_max(f, x0, lo, hi, 120);
  CHECK(r.value >= f(x0));
}

TEST_CASE("golden-section finds the scalar minimum") {
  auto f = [](double x) { return (x - 0.3) * (x - 0.3); };
  CHECK(std::abs(opt::golden_section_min(f, 0.0, 1.0) - 0.3) < 1e-10);
}
