#include "mpctune/noise_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mpctune/opt.hpp"

namespace mpctune::noise {

FeatureMap FeatureMap::polynomial(int degree, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper) {
  if (degree < 0) throw std::invalid_argument("feature degree must be >= 0");
  FeatureMap m;
  m.kind_ = FeatureKind::polynomial;
  m.degree_ = degree;
  m.lower_ = lower;
  m.upper_ = upper;
  return m;
}

FeatureMap FeatureMap::kernel(const Eigen::MatrixXd& centres, double shape,
                              double lengthscale, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper) {
  FeatureMap m;
  m.kind_ = FeatureKind::kernel;
  m.centres_ = centres;
  m.shape_ = shape;
  m.lengthscale_ = lengthscale;
  m.lower_ = lower;
  m.upper_ = upper;
  return m;
}

Eigen::VectorXd FeatureMap::normalise(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z(x.size());
  for (int d = 0; d < x.size(); ++d) {
    const double w = upper_[d] - lower_[d];
    z[d] = w > 0.0 ? (x[d] - lower_[d]) / w : 0.0;
  }
  return z;
}

int FeatureMap::output_dim() const {
  if (kind_ == FeatureKind::polynomial)
    return 1 + static_cast<int>(lower_.size()) * degree_;
  return static_cast<int>(centres_.rows());
}

Eigen::VectorXd FeatureMap::operator()(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = normalise(x);
  Eigen::VectorXd phi(output_dim());
  if (kind_ == FeatureKind::polynomial) {
    phi[0] = 1.0;
    int at = 1;
    for (int d = 0; d < z.size(); ++d) {
      double pw = 1.0;
      for (int p = 0; p < degree_; ++p) {
        pw *= z[d];
        phi[at++] = pw;
      }
    }
  } else {
    for (int c = 0; c < centres_.rows(); ++c) {
      const double r2 = (z - centres_.row(c).transpose()).squaredNorm();
      phi[c] = std::pow(
          1.0 + r2 / (2.0 * shape_ * lengthscale_ * lengthscale_), -shape_);
    }
  }
  return phi;
}

Eigen::MatrixXd kmeans_centres(const Eigen::MatrixXd& points, int k,
                               rng::Engine& eng, int iters) {
  const int n = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (n < k) throw std::invalid_argument("kmeans: fewer points than centres");

  // Initialise with k distinct rows drawn without replacement.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(order[i], order[pick(eng)]);
  }
  Eigen::MatrixXd centres(k, d);
  for (int c = 0; c < k; ++c) centres.row(c) = points.row(order[c]);

  std::vector<int> assign(n, -1);
  for (int it = 0; it < iters; ++it) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centres.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dd = (points.row(i) - centres.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        moved = true;
      }
    }
    if (!moved) break;
    for (int c = 0; c < k; ++c) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (assign[i] == c) {
          sum += points.row(i);
          ++count;
        }
      if (count > 0) centres.row(c) = sum / count;
    }
  }
  return centres;
}

namespace {

Eigen::MatrixXd feature_matrix(const FeatureMap& map,
                               const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd phi(inputs.rows(), map.output_dim());
  for (int i = 0; i < inputs.rows(); ++i)
    phi.row(i) = map(inputs.row(i)).transpose();
  return phi;
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& phi,
                                    const Eigen::VectorXd& rhs) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
  if (qr.rank() == phi.cols() && phi.rows() >= phi.cols())
    return qr.solve(rhs);
  // Rank-deficient or under-determined: small ridge keeps the solve stable.
  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += 1e-8;
  return Eigen::LDLT<Eigen::MatrixXd>(gram).solve(phi.transpose() * rhs);
}

// High-degree monomial bases are severely ill-conditioned, and runaway
// coefficients here turn into exp() overflow downstream, so the shape fit
// always carries a penalty scaled to the feature energy.
Eigen::VectorXd ridge_least_squares(const Eigen::MatrixXd& phi,
                                    const Eigen::VectorXd& rhs) {
  const int m = static_cast<int>(phi.cols());
  Eigen::MatrixXd gram = phi.transpose() * phi;
  const double scale = gram.trace() / m;
  gram.diagonal().array() += 1e-8 * (scale > 0.0 ? scale : 1.0);
  return Eigen::LDLT<Eigen::MatrixXd>(gram).solve(phi.transpose() * rhs);
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const auto i = static_cast<size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] * (1.0 - f) + v[i + 1] * f : v[i];
}

}  // namespace

TrendModel fit_trend(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& values, const FeatureMap& map) {
  if (inputs.rows() != values.size() || inputs.rows() == 0)
    throw std::invalid_argument("fit_trend: empty or mismatched data");
  TrendModel t;
  t.alpha = solve_least_squares(feature_matrix(map, inputs), values);
  return t;
}

double NoiseModel::exponent_factor(const FeatureMap& map,
                                   const Eigen::VectorXd& x,
                                   bool* saturated) const {
  if (saturated) *saturated = false;
  // An empty coefficient vector is the empty sum: exponent zero, factor one.
  // Injected constant models carry no feature weights at all.
  double e = beta.size() == 0 ? 0.0 : beta.dot(map(x));
  if (e > exponent_cap) {
    e = exponent_cap;
    if (saturated) *saturated = true;
  } else if (e < exponent_floor) {
    e = exponent_floor;
    if (saturated) *saturated = true;
  }
  return std::exp(e);
}

double NoiseModel::std(const FeatureMap& map, const Eigen::VectorXd& x,
                       bool* saturated) const {
  if (z == 0.0) {
    if (saturated) *saturated = false;
    return zeta;
  }
  return z * exponent_factor(map, x, saturated) + zeta;
}

NoiseModel fit_noise(const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& values, const TrendModel& trend,
                     const FeatureMap& map, const NoiseFitOptions& opts) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw std::invalid_argument("fit_noise: empty data");

  // Absolute residuals against the trend, converted to std scale: the mean
  // absolute deviation of a centred Gaussian is sigma * sqrt(2/pi).
  const double mad_to_std = std::sqrt(M_PI / 2.0);
  Eigen::VectorXd target(n);
  std::vector<double> target_v(n);
  for (int i = 0; i < n; ++i) {
    const double q = std::abs(values[i] - trend.predict(map, inputs.row(i)));
    target[i] = mad_to_std * q;
    target_v[i] = target[i];
  }

  const double range = values.maxCoeff() - values.minCoeff();
  const double floor = std::max(opts.floor_frac * range, 1e-12);

  // Locally averaged targets for the shape fit: the raw std-scale targets
  // carry ~75% relative noise, which the log transform would distort, so the
  // log-linear stage sees k-nearest-neighbour means instead.
  const int k_smooth = std::clamp(n / 10, std::min(5, n), 30);
  Eigen::MatrixXd norm_pts(n, inputs.cols());
  for (int i = 0; i < n; ++i)
    norm_pts.row(i) = map.normalise(inputs.row(i)).transpose();
  Eigen::VectorXd smooth(n);
  std::vector<std::pair<double, int>> near(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      near[j] = {(norm_pts.row(i) - norm_pts.row(j)).squaredNorm(), j};
    std::nth_element(near.begin(), near.begin() + (k_smooth - 1), near.end());
    double acc = 0.0;
    for (int j = 0; j < k_smooth; ++j) acc += target[near[j].second];
    smooth[i] = acc / k_smooth;
  }

  NoiseModel model;
  model.zeta = quantile(target_v, 0.25);

  Eigen::VectorXd excess = target.array() - model.zeta;
  if ((excess.array() <= floor).all()) {
    // No input-dependent structure above the floor: constant noise whose
    // level is the plain mean absolute residual.
    NoiseModel flat;
    flat.z = 0.0;
    flat.zeta = (target / mad_to_std).mean();
    flat.beta = Eigen::VectorXd::Zero(map.output_dim());
    return flat;
  }

  const Eigen::MatrixXd phi = feature_matrix(map, inputs);
  const double t_max = target.maxCoeff();
  model.z = 1.0;
  model.beta = Eigen::VectorXd::Zero(map.output_dim());

  // Alternate three estimates until they settle: the log-linear shape fit on
  // floor-clamped excesses over every point, then bounded scalar polish of
  // the magnitude and the offset on the std-scale targets.  Fitting all
  // points keeps the exponent anchored to data across the whole input range;
  // a fit restricted to the loud region extrapolates explosively elsewhere.
  Eigen::VectorXd factor = Eigen::VectorXd::Ones(n);
  for (int pass = 0; pass < opts.refine_passes; ++pass) {
    // The clamp for quiet points sits no more than three decades below the
    // loudest excess: a deeper cliff makes the polynomial ring hard enough
    // at the edges of the input range to corrupt predictions there.
    const double ex_max = (smooth.array() - model.zeta).maxCoeff();
    const double clamp_at = std::max(floor, 1e-3 * ex_max);
    Eigen::VectorXd logs(n);
    for (int i = 0; i < n; ++i)
      logs[i] = std::log(std::max(smooth[i] - model.zeta, clamp_at));
    if (map.has_constant()) {
      model.beta = ridge_least_squares(phi, logs);
      model.z = 1.0;
    } else {
      // No constant feature: absorb the intercept into z.
      Eigen::MatrixXd aug(n, phi.cols() + 1);
      aug.col(0).setOnes();
      aug.rightCols(phi.cols()) = phi;
      const Eigen::VectorXd coef = ridge_least_squares(aug, logs);
      model.z = std::exp(coef[0]);
      model.beta = coef.tail(phi.cols());
    }
    for (int i = 0; i < n; ++i)
      factor[i] = model.exponent_factor(map, inputs.row(i));

    const double z_hi =
        10.0 * (t_max + floor) / std::max(factor.minCoeff(), 1e-12);
    model.z = opt::golden_section_min(
        [&](double zz) {
          return (zz * factor.array() + model.zeta - target.array())
              .square()
              .sum();
        },
        0.0, z_hi);
    model.zeta = opt::golden_section_min(
        [&](double zt) {
          return (model.z * factor.array() + zt - target.array())
              .square()
              .sum();
        },
        0.0, t_max);
  }

  // The exponential is a smoother of observed residuals, not an
  // extrapolator: clamp the prediction exponent just above the largest value
  // seen in training, so outside the data's reach the noise level holds at
  // its loudest fitted value instead of exploding at the box edges.
  double e_max = model.beta.dot(map(inputs.row(0)));
  for (int i = 1; i < n; ++i)
    e_max = std::max(e_max, model.beta.dot(map(inputs.row(i))));
  model.exponent_cap = e_max + std::log(2.0);
  return model;
}

}  // namespace mpctune::noise
