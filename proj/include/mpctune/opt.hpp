#pragma once

#include <Eigen/Core>
#include <functional>

namespace mpctune::opt {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

// Derivative-free local maximisation over a box via Nelder-Mead with every
// trial vertex clamped into [lower, upper].  Returns the best vertex seen,
// which is never worse than f(x0).  Objectives may return -inf to veto a
// region.  Fully deterministic for a given x0.
Result nelder_mead_max(const Objective& f, const Eigen::VectorXd& x0,
                       const Eigen::VectorXd& lower,
                       const Eigen::VectorXd& upper, int max_evals = 200,
                       double step_frac = 0.1);

// Golden-section minimisation of a scalar function on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, int iters = 80);

}  // namespace mpctune::opt
