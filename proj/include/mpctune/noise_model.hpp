#pragma once

#include <Eigen/Core>

#include "mpctune/rng.hpp"

namespace mpctune::noise {

enum class FeatureKind { polynomial, kernel };

// Feature map phi(x) used by both the reward-trend model and the noise
// model.  Inputs are first normalised per dimension onto [0,1] using the
// stored box.
//
// polynomial: [1, x_1, x_1^2, ..., x_1^degree, x_2, ...]  (1 + d*degree)
// kernel:     rational-quadratic bumps around fixed centres, no constant
class FeatureMap {
 public:
  static FeatureMap polynomial(int degree, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper);
  static FeatureMap kernel(const Eigen::MatrixXd& centres, double shape,
                           double lengthscale, const Eigen::VectorXd& lower,
                           const Eigen::VectorXd& upper);

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd normalise(const Eigen::VectorXd& x) const;
  int output_dim() const;
  bool has_constant() const { return kind_ == FeatureKind::polynomial; }

  FeatureKind kind() const { return kind_; }
  int degree() const { return degree_; }
  const Eigen::MatrixXd& centres() const { return centres_; }
  double shape() const { return shape_; }
  double lengthscale() const { return lengthscale_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

 private:
  FeatureKind kind_ = FeatureKind::polynomial;
  int degree_ = 1;
  Eigen::MatrixXd centres_;  // rows are normalised centre locations
  double shape_ = 1.0;
  double lengthscale_ = 0.25;
  Eigen::VectorXd lower_, upper_;
};

// Lloyd k-means on normalised inputs; used to place the kernel features.
Eigen::MatrixXd kmeans_centres(const Eigen::MatrixXd& points, int k,
                               rng::Engine& eng, int iters = 25);

// Linear trend of the expected objective, g(x) ~ alpha^T phi(x).
struct TrendModel {
  Eigen::VectorXd alpha;
  double predict(const FeatureMap& map, const Eigen::VectorXd& x) const {
    return alpha.dot(map(x));
  }
};

// Least-squares trend fit; falls back to a ridge solve when the feature
// matrix is rank-deficient.
TrendModel fit_trend(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& values, const FeatureMap& map);

// Input-dependent observation-noise std: sigma(x) = z * exp(beta^T phi(x)) + zeta.
struct NoiseModel {
  double z = 0.0;
  double zeta = 0.0;
  Eigen::VectorXd beta;
  // Bounds on beta^T phi before exponentiation.  The defaults only prevent
  // overflow; fit_noise tightens the cap to just above the largest exponent
  // seen in training so predictions outside the data's reach hold at the
  // loudest fitted level.  The floor stays wide open: a very negative
  // exponent underflows harmlessly toward the zeta offset.
  double exponent_cap = 500.0;
  double exponent_floor = -500.0;

  // exp(beta^T phi(x)), clamped so it can never overflow.
  double exponent_factor(const FeatureMap& map, const Eigen::VectorXd& x,
                         bool* saturated = nullptr) const;
  // z * exponent_factor + zeta; zero z short-circuits to the constant zeta.
  double std(const FeatureMap& map, const Eigen::VectorXd& x,
             bool* saturated = nullptr) const;
};

struct NoiseFitOptions {
  double floor_frac = 1e-6;  // residual floor as a fraction of the value range
  int refine_passes = 3;     // alternating 1-D polish of (z, zeta)
};

// Two-stage noise fit: absolute residuals against the trend are converted to
// std-scale targets, an offset zeta is split off at the lower quartile, and
// the remainder is fitted in log space by linear least squares, then z and
// zeta are polished by bounded scalar searches.  If every residual sits at
// the floor the fit degenerates to a constant model (z = 0).
NoiseModel fit_noise(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& values, const TrendModel& trend,
                     const FeatureMap& map, const NoiseFitOptions& opts = {});

}  // namespace mpctune::noise
