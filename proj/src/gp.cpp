#include "mpctune/gp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mpctune/opt.hpp"

namespace mpctune::gp {

double Kernel::operator()(const Eigen::VectorXd& a,
                          const Eigen::VectorXd& b) const {
  double q = 0.0;
  for (int d = 0; d < a.size(); ++d) {
    const double r = (a[d] - b[d]) / lengthscales[d];
    q += r * r;
  }
  return amplitude * amplitude * std::exp(-0.5 * q);
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) out(i, j) = k(a.row(i), b.row(j));
  return out;
}

Model::Model(Kernel k, double prior_mean, Dataset data)
    : kernel_(std::move(k)), mean_(prior_mean), data_(std::move(data)) {
  const int n = data_.size();
  if (n == 0) return;

  if (kernel_.lengthscales.size() != data_.inputs.cols())
    throw std::runtime_error("gp: kernel lengthscale dimension mismatch");
  Eigen::MatrixXd cov = kernel_matrix(kernel_, data_.inputs, data_.inputs);
  cov.diagonal() += data_.noise_var;
  // LLT does not reliably flag NaN input, so reject it before factorising.
  if (!cov.allFinite())
    throw std::runtime_error("gp: covariance not finite");

  for (jitter_ = 1e-10; jitter_ <= 1.0001e-6; jitter_ *= 10.0) {
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += jitter_;
    llt_.compute(jittered);
    if (llt_.info() == Eigen::Success) break;
  }
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("gp: covariance not positive definite");

  const Eigen::VectorXd centred =
      data_.targets - Eigen::VectorXd::Constant(n, mean_);
  alpha_ = llt_.solve(centred);

  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += std::log(llt_.matrixL()(i, i));
  logdet *= 2.0;
  lml_ = -0.5 * centred.dot(alpha_) - 0.5 * logdet -
         0.5 * n * std::log(2.0 * M_PI);
}

Posterior Model::posterior(const Eigen::VectorXd& x) const {
  Posterior out;
  const double prior_var = kernel_.amplitude * kernel_.amplitude;
  if (data_.size() == 0) {
    out.mean = mean_;
    out.variance = prior_var;
    return out;
  }
  Eigen::VectorXd kx(data_.size());
  for (int i = 0; i < data_.size(); ++i)
    kx[i] = kernel_(data_.inputs.row(i), x);
  out.mean = mean_ + kx.dot(alpha_);
  const Eigen::VectorXd v = llt_.solve(kx);
  out.variance = std::max(0.0, prior_var - kx.dot(v));
  return out;
}

namespace {

Eigen::VectorXd noise_profile(const Hyper& h, NoiseMode mode,
                              const Eigen::VectorXd& noise_exp,
                              double noise_offset, int n) {
  Eigen::VectorXd var(n);
  if (mode == NoiseMode::homoscedastic) {
    var.setConstant(h.sigma_nu * h.sigma_nu);
  } else {
    for (int i = 0; i < n; ++i) {
      const double sd = h.z * noise_exp[i] + noise_offset;
      var[i] = sd * sd;
    }
  }
  return var;
}

}  // namespace

FitOutcome fit_hyperparams(const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& targets, double prior_mean,
                           const Hyper& theta0, NoiseMode mode,
                           const Eigen::VectorXd& noise_exp,
                           double noise_offset, rng::Engine& eng,
                           const FitOptions& opts) {
  const int n = static_cast<int>(targets.size());
  const int d = static_cast<int>(inputs.cols());
  const int np = 2 + d;  // log amplitude, log lengthscales, log noise size

  auto pack = [&](const Hyper& h) {
    Eigen::VectorXd p(np);
    p[0] = std::log(h.kernel.amplitude);
    for (int k = 0; k < d; ++k) p[1 + k] = std::log(h.kernel.lengthscales[k]);
    p[1 + d] = std::log(mode == NoiseMode::homoscedastic ? h.sigma_nu : h.z);
    return p;
  };
  auto unpack = [&](const Eigen::VectorXd& p) {
    Hyper h = theta0;
    h.kernel.amplitude = std::exp(p[0]);
    h.kernel.lengthscales.resize(d);
    for (int k = 0; k < d; ++k) h.kernel.lengthscales[k] = std::exp(p[1 + k]);
    if (mode == NoiseMode::homoscedastic)
      h.sigma_nu = std::exp(p[1 + d]);
    else
      h.z = std::exp(p[1 + d]);
    return h;
  };

  auto objective = [&](const Eigen::VectorXd& p) {
    const Hyper h = unpack(p);
    try {
      Dataset ds{inputs, targets,
                 noise_profile(h, mode, noise_exp, noise_offset, n)};
      return Model(h.kernel, prior_mean, std::move(ds))
          .log_marginal_likelihood();
    } catch (const std::runtime_error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const Eigen::VectorXd center = pack(theta0);
  const double span = opts.decades * std::log(10.0);
  const Eigen::VectorXd lo = center.array() - span;
  const Eigen::VectorXd hi = center.array() + span;

  Eigen::VectorXd best_p = center;
  double best_v = objective(center);
  const double base_v = best_v;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < opts.starts; ++s) {
    Eigen::VectorXd p0 = center;
    if (s > 0)
      for (int k = 0; k < np; ++k) p0[k] = lo[k] + (hi[k] - lo[k]) * unif(eng);
    const auto r = opt::nelder_mead_max(objective, p0, lo, hi, opts.max_evals);
    if (r.value > best_v) {
      best_v = r.value;
      best_p = r.x;
    }
  }

  FitOutcome out;
  out.hyper = unpack(best_p);
  out.lml = best_v;
  out.improved = best_v > base_v;
  return out;
}

}  // namespace mpctune::gp
