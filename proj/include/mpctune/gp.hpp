#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mpctune/rng.hpp"

namespace mpctune::gp {

// Squared-exponential covariance with one lengthscale per input dimension.
struct Kernel {
  double amplitude = 1.0;        // signal std
  Eigen::VectorXd lengthscales;  // one per input dimension

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

// Cross-covariance of two point sets given row-wise (n x d and m x d).
Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

struct Dataset {
  Eigen::MatrixXd inputs;     // n x d
  Eigen::VectorXd targets;    // n
  Eigen::VectorXd noise_var;  // n, per-point observation-noise variance
  int size() const { return static_cast<int>(targets.size()); }
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

// GP conditioned on a dataset under a constant prior mean.  The noisy
// covariance K + diag(noise_var) is factorised once at construction with a
// Cholesky decomposition; if the factorisation fails, diagonal jitter is
// escalated through 1e-10..1e-6 before giving up with std::runtime_error.
class Model {
 public:
  Model(Kernel k, double prior_mean, Dataset data);

  Posterior posterior(const Eigen::VectorXd& x) const;
  double log_marginal_likelihood() const { return lml_; }

  const Kernel& kernel() const { return kernel_; }
  double prior_mean() const { return mean_; }
  const Dataset& data() const { return data_; }
  double jitter() const { return jitter_; }

 private:
  Kernel kernel_;
  double mean_ = 0.0;
  Dataset data_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;  // (K + Sigma)^-1 (y - m)
  double lml_ = 0.0;
  double jitter_ = 0.0;
};

enum class NoiseMode { homoscedastic, heteroscedastic };

// Free GP hyper-parameters: the kernel plus one noise magnitude.  The
// homoscedastic mode fits sigma_nu, a constant observation-noise std.  The
// heteroscedastic mode fits z, the overall magnitude of a location-dependent
// noise std z * e_i + offset whose per-point factors e_i and offset come
// from a separately fitted parametric noise model.
struct Hyper {
  Kernel kernel;
  double sigma_nu = 1.0;
  double z = 1.0;
};

struct FitOptions {
  int starts = 8;        // multi-start count, the first start being theta0
  int max_evals = 160;   // simplex evaluations per start
  double decades = 3.0;  // log10 search span centred on theta0
};

struct FitOutcome {
  Hyper hyper;
  double lml = 0.0;
  bool improved = false;  // false when no start beat theta0
};

// Maximum-likelihood fit of the kernel and noise magnitude by multi-start
// simplex search in log-parameter space; the incumbent theta0 is always a
// candidate, so the returned hyper-parameters never score below it.
FitOutcome fit_hyperparams(const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& targets, double prior_mean,
                           const Hyper& theta0, NoiseMode mode,
                           const Eigen::VectorXd& noise_exp,
                           double noise_offset, rng::Engine& eng,
                           const FitOptions& opts = {});

}  // namespace mpctune::gp
