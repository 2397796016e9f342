#include "mpctune/cmaes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mpctune::cmaes {

Cmaes::Cmaes(Eigen::VectorXd mean, const CmaConfig& cfg, const bo::Box& box)
    : box_(box),
      dim_(static_cast<int>(mean.size())),
      lambda_(cfg.popsize),
      mean_(std::move(mean)),
      sigma_(cfg.sigma0),
      sigma0_(cfg.sigma0),
      best_fitness_(std::numeric_limits<double>::infinity()) {
  if (lambda_ < 2) throw std::invalid_argument("cmaes: popsize must be >= 2");
  const double n = dim_;

  mu_ = lambda_ / 2;
  weights_.resize(mu_);
  for (int i = 0; i < mu_; ++i)
    weights_[i] = std::log(mu_ + 0.5) - std::log(i + 1.0);
  weights_ /= weights_.sum();
  mu_eff_ = 1.0 / weights_.squaredNorm();

  cc_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
  cs_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                 ((n + 2.0) * (n + 2.0) + mu_eff_));
  cmu_ = std::max(0.0, cmu_);
  damps_ =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
      cs_;
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  pc_ = Eigen::VectorXd::Zero(dim_);
  ps_ = Eigen::VectorXd::Zero(dim_);
  cov_ = Eigen::MatrixXd::Identity(dim_, dim_);
  refresh_eigen();
}

void Cmaes::reset_distribution() {
  cov_ = Eigen::MatrixXd::Identity(dim_, dim_);
  pc_.setZero();
  ps_.setZero();
  sigma_ = sigma0_;
  if (!mean_.allFinite()) mean_ = (box_.lower + box_.upper) / 2.0;
  ++resets_;
  refresh_eigen();
}

void Cmaes::refresh_eigen() {
  if (!cov_.allFinite() || !std::isfinite(sigma_) || !mean_.allFinite()) {
    reset_distribution();
    return;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (cov_ + cov_.transpose()));
  if (es.info() != Eigen::Success) {
    reset_distribution();
    return;
  }
  eigvec_ = es.eigenvectors();
  // Floor keeps the sampling distribution full-rank.
  eigval_sqrt_ =
      es.eigenvalues().cwiseMax(1e-12).cwiseSqrt();
}

Eigen::MatrixXd Cmaes::ask(rng::Engine& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd cands(lambda_, dim_);
  for (int i = 0; i < lambda_; ++i) {
    Eigen::VectorXd zv(dim_);
    for (int k = 0; k < dim_; ++k) zv[k] = gauss(eng);
    const Eigen::VectorXd x =
        mean_ + sigma_ * (eigvec_ * (eigval_sqrt_.asDiagonal() * zv));
    cands.row(i) = box_.clamp(x).transpose();
  }
  return cands;
}

void Cmaes::tell(const Eigen::MatrixXd& candidates,
                 const Eigen::VectorXd& fitness) {
  if (candidates.rows() != lambda_ || fitness.size() != lambda_)
    throw std::invalid_argument("cmaes: generation size mismatch");
  const double n = dim_;

  std::vector<int> order(lambda_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitness[a] < fitness[b]; });
  best_fitness_ = std::min(best_fitness_, fitness[order[0]]);

  const Eigen::VectorXd old_mean = mean_;
  mean_.setZero();
  for (int i = 0; i < mu_; ++i)
    mean_ += weights_[i] * candidates.row(order[i]).transpose();

  const Eigen::VectorXd shift = (mean_ - old_mean) / sigma_;
  // C^{-1/2} * shift via the cached eigendecomposition.
  const Eigen::VectorXd whitened =
      eigvec_ *
      (eigval_sqrt_.cwiseInverse().asDiagonal() *
       (eigvec_.transpose() * shift));

  ps_ = (1.0 - cs_) * ps_ +
        std::sqrt(cs_ * (2.0 - cs_) * mu_eff_) * whitened;
  ++gen_;
  const double ps_norm = ps_.norm();
  const bool hsig =
      ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * gen_)) / chi_n_ <
      1.4 + 2.0 / (n + 1.0);

  pc_ = (1.0 - cc_) * pc_;
  if (hsig) pc_ += std::sqrt(cc_ * (2.0 - cc_) * mu_eff_) * shift;

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < mu_; ++i) {
    const Eigen::VectorXd yi =
        (candidates.row(order[i]).transpose() - old_mean) / sigma_;
    rank_mu += weights_[i] * yi * yi.transpose();
  }
  cov_ = (1.0 - c1_ - cmu_) * cov_ +
         c1_ * (pc_ * pc_.transpose() +
                (hsig ? 0.0 : cc_ * (2.0 - cc_)) * cov_) +
         cmu_ * rank_mu;

  sigma_ *= std::exp(cs_ / damps_ * (ps_norm / chi_n_ - 1.0));
  refresh_eigen();
}

CmaRunResult run_cmaes(const bo::EpisodeFn& fn, const bo::Box& box,
                       const Eigen::VectorXd& start,
                       const bo::RewardScaler& scaler, const CmaConfig& cfg,
                       int budget, int n_r, std::uint64_t master_seed,
                       bool timing) {
  CmaRunResult out;
  Cmaes strategy(box.clamp(start), cfg, box);

  int t = 0;
  auto record = [&](const Eigen::VectorXd& x) {
    const auto rec = bo::observe(
        fn, x, n_r, scaler,
        rng::derive(master_seed,
                    {rng::online_stream, static_cast<std::uint64_t>(t)}),
        t, timing);
    out.trace.push_back(rec);
    ++t;
    return rec.y;
  };

  record(box.clamp(start));
  while (t < budget) {
    rng::Engine gen_eng = rng::engine_at(
        master_seed, {rng::acquisition_stream,
                      static_cast<std::uint64_t>(strategy.generation())});
    const Eigen::MatrixXd cands = strategy.ask(gen_eng);
    Eigen::VectorXd fitness(cands.rows());
    for (int i = 0; i < cands.rows(); ++i)
      fitness[i] = -record(cands.row(i));
    strategy.tell(cands, fitness);
  }
  if (static_cast<int>(out.trace.size()) > budget) out.trace.resize(budget);

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& rec : out.trace)
    if (rec.y > best) {
      best = rec.y;
      out.best_x = rec.x;
    }
  out.best_value = best;
  return out;
}

}  // namespace mpctune::cmaes
